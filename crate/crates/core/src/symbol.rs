//! The operator symbol `p^4 - a - i b p`, the resolvent multiplier
//! `G(p) / (p^4 - a - i b p)`, the sup constants that bound it, and the
//! orthogonality gate that decides solvability when `a = 0`.
//!
//! For `a > 0` the symbol stays away from the origin and the multiplier is
//! bounded unconditionally. For `a = 0` the symbol vanishes at `p = 0` and
//! boundedness requires the kernel to have zero mean; the gate checks that
//! before any division happens, and the multiplier's origin entry is then the
//! finite limit obtained from the kernel's signed first moment (line) or is
//! pinned to zero on the constrained zero-mean subspace (interval).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::kernel::Kernel;

/// Modes with `|symbol|` below this are never divided by.
pub const DIVISION_GUARD: f64 = 1e-14;

/// Relative factor for the orthogonality tolerance `1e-8 * max(1, ||G||_L1)`.
pub const ORTHOGONALITY_TOL_FACTOR: f64 = 1e-8;

/// Coefficients of the constant-coefficient operator: `a >= 0` on the
/// zeroth-order term and a nonzero drift `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    a: f64,
    b: f64,
}

impl OperatorParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::Config(format!("a = {a} must be finite and >= 0")));
        }
        if !b.is_finite() || b == 0.0 {
            return Err(Error::Config(format!("b = {b} must be finite and nonzero")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// `p^4 - a - i b p`, the essential-spectrum curve of the operator; on the
/// interval the same expression over integer `p` lists its eigenvalues.
pub fn symbol_value(p: f64, params: OperatorParams) -> Complex64 {
    Complex64::new(p.powi(4) - params.a, -params.b * p)
}

/// Distance from the origin to the operator spectrum. Zero exactly when
/// `a = 0` (attained at `p = 0`, which every grid contains).
///
/// On the line the essential spectrum is the full symbol curve, so the grid
/// scan is refined by a golden-section search around the minimizer (the
/// candidates sit at `p = 0` and near `p^4 = a`). On the interval the
/// spectrum is the discrete eigenvalue set over integer modes and the grid
/// minimum is already exact: the tail `|n| > N/2` only increases the
/// modulus.
pub fn spectrum_origin_distance(params: OperatorParams, grid: &Grid) -> f64 {
    if params.a == 0.0 {
        return 0.0;
    }
    let abs_at = |p: f64| symbol_value(p, params).norm();
    let grid_min = grid
        .freq()
        .iter()
        .map(|&p| abs_at(p))
        .fold(f64::INFINITY, f64::min);
    if grid.is_periodic() {
        return grid_min;
    }

    // |symbol(-p)| = |symbol(p)|, and beyond p^4 = a the modulus increases,
    // so the continuum minimum lies in [0, a^(1/4)].
    let hi = params.a.powf(0.25) * 1.0001;
    let steps = 4096;
    let mut best_p = 0.0;
    let mut best = abs_at(0.0);
    for s in 0..=steps {
        let p = hi * s as f64 / steps as f64;
        let v = abs_at(p);
        if v < best {
            best = v;
            best_p = p;
        }
    }
    let h = hi / steps as f64;
    let refined = golden_min(&abs_at, (best_p - h).max(0.0), best_p + h);
    grid_min.min(best).min(refined)
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_895_f64;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..120 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// Outcome of the orthogonality gate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolvabilityReport {
    pub solvable: bool,
    /// `sqrt(2*pi) * |zero mode|`, i.e. `|integral of G|`.
    pub orthogonality_residual: f64,
    pub moment_finite: bool,
}

pub fn orthogonality_tolerance(kernel: &Kernel) -> f64 {
    ORTHOGONALITY_TOL_FACTOR * kernel.l1().max(1.0)
}

/// For `a > 0` the problem is solvable unconditionally and the residual is
/// informational. For `a = 0` the kernel must have zero mean within the
/// relative tolerance (and a finite first moment on the line).
pub fn check_solvability(kernel: &Kernel, params: OperatorParams) -> SolvabilityReport {
    let residual = (2.0 * PI).sqrt() * kernel.zero_mode().norm();
    let moment_finite = kernel.moment1().is_none_or(f64::is_finite);
    let solvable = if params.a > 0.0 {
        true
    } else {
        residual <= orthogonality_tolerance(kernel) && moment_finite
    };
    SolvabilityReport {
        solvable,
        orthogonality_residual: residual,
        moment_finite,
    }
}

/// Coefficient-wise `G(p) / (p^4 - a - i b p)` on the grid frequencies.
///
/// With `a = 0` the origin entry is the finite limit (line) or zero
/// (interval, zero-mean subspace); the gate must pass first. The unpaired
/// mode at `-N/2` is dropped. Every other mode must clear the division
/// guard.
pub fn multiplier(kernel: &Kernel, params: OperatorParams, grid: &Grid) -> Result<SpectralField> {
    if !kernel.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let zero_origin = params.a == 0.0;
    if zero_origin {
        let gate = check_solvability(kernel, params);
        if !gate.solvable {
            return Err(Error::SolvabilityGate {
                residual: gate.orthogonality_residual,
                tolerance: orthogonality_tolerance(kernel),
            });
        }
    }
    let zero_index = grid.zero_mode_index();
    let n = grid.len();
    let mut coeffs = Vec::with_capacity(n);
    for (i, (&p, &g)) in grid
        .freq()
        .iter()
        .zip(kernel.spectrum().coeffs())
        .enumerate()
    {
        if i == 0 {
            coeffs.push(Complex64::new(0.0, 0.0));
        } else if zero_origin && i == zero_index {
            if grid.is_periodic() {
                coeffs.push(Complex64::new(0.0, 0.0));
            } else {
                coeffs.push(kernel.resolvent_origin_limit(params.b));
            }
        } else {
            let lambda = symbol_value(p, params);
            if lambda.norm() < DIVISION_GUARD {
                return Err(Error::DivisionGuard {
                    frequency: p,
                    magnitude: lambda.norm(),
                });
            }
            coeffs.push(g / lambda);
        }
    }
    SpectralField::new(kernel.grid().clone(), coeffs)
}

/// Sup bounds on the resolvent multiplier and the solvability verdict.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierReport {
    pub a: f64,
    pub b: f64,
    pub domain: String,
    /// `max(sup_low, sup_high, tail_bound)`; infinite when the gate fails.
    #[serde(rename = "N_value")]
    pub n_value: f64,
    /// Sup of `|G(p) / symbol|` over the grid.
    pub sup_low: f64,
    /// Sup of `|p^4 G(p) / symbol|` over the grid.
    pub sup_high: f64,
    /// Closed-form bound covering frequencies beyond the outer grid band.
    pub tail_bound: f64,
    /// Smallest `|symbol|` among the modes actually divided by.
    pub min_abs_symbol: f64,
    pub solvable: bool,
    pub orthogonality_residual: f64,
}

/// Evaluate the two sup constants on the grid, add a tail bound for the
/// unresolved frequencies, and apply the gate.
///
/// When `a = 0` and the gate fails the sups are still reported (origin mode
/// excluded) so refinement studies can watch them grow, but `n_value` is the
/// infinite marker and `solvable` is false.
pub fn compute_n(kernel: &Kernel, params: OperatorParams, grid: &Grid) -> Result<MultiplierReport> {
    if !kernel.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let gate = check_solvability(kernel, params);
    let zero_origin = params.a == 0.0;
    let zero_index = grid.zero_mode_index();

    let mut sup_low = 0.0f64;
    let mut sup_high = 0.0f64;
    let mut min_abs_symbol = f64::INFINITY;
    for (i, (&p, &g)) in grid
        .freq()
        .iter()
        .zip(kernel.spectrum().coeffs())
        .enumerate()
    {
        if zero_origin && i == zero_index {
            if gate.solvable && !grid.is_periodic() {
                sup_low = sup_low.max(kernel.resolvent_origin_limit(params.b).norm());
            }
            // interval: constrained subspace, entry 0; gate failure: excluded
            continue;
        }
        let lambda = symbol_value(p, params).norm();
        min_abs_symbol = min_abs_symbol.min(lambda);
        let low = g.norm() / lambda;
        sup_low = sup_low.max(low);
        sup_high = sup_high.max(p.powi(4) * g.norm() / lambda);
    }

    let tail_bound = tail_bound(kernel, params, grid);
    let solvable = gate.solvable;
    let n_value = if zero_origin && !solvable {
        f64::INFINITY
    } else {
        sup_low.max(sup_high).max(tail_bound)
    };
    Ok(MultiplierReport {
        a: params.a,
        b: params.b,
        domain: domain_name(grid),
        n_value,
        sup_low,
        sup_high,
        tail_bound,
        min_abs_symbol,
        solvable,
        orthogonality_residual: gate.orthogonality_residual,
    })
}

/// Bound both multiplier branches beyond `p_cut = 0.9 * p_max` using the
/// splitting `p^4 G / symbol = G + a G / symbol + i b p G / symbol`, whose
/// middle term is at most `a |G| / (p^4 - a)` and whose last term is at most
/// `|G|`. The kernel's spectral amplitude over the tail is estimated from
/// the outer grid band.
fn tail_bound(kernel: &Kernel, params: OperatorParams, grid: &Grid) -> f64 {
    let p_cut = 0.9 * grid.max_freq();
    let tail_amp = grid
        .freq()
        .iter()
        .zip(kernel.spectrum().coeffs())
        .filter(|(&p, _)| p.abs() >= p_cut)
        .map(|(_, c)| c.norm())
        .fold(0.0f64, f64::max);
    let denom = p_cut.powi(4) - params.a;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    let low = tail_amp / denom;
    let high = tail_amp * (2.0 + params.a / denom);
    low.max(high)
}

fn domain_name(grid: &Grid) -> String {
    if grid.is_periodic() {
        "periodic_interval".into()
    } else {
        "whole_line".into()
    }
}
