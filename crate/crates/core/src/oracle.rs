//! Brute-force references for the spectral code paths.
//!
//! Everything here works in physical space with direct sums (no FFT, no
//! shared transform code), so a bug in the fast paths cannot hide behind an
//! identical bug in its own check. These routines are O(N^2) or worse on
//! purpose.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{build_grid, DomainSpec, Grid};
use crate::kernel::Kernel;
use crate::norms::h4_norm_spectral;
use crate::solver::{fixed_point_solve, ProblemConfig};
use crate::symbol::{symbol_value, OperatorParams};

/// Rectangle-rule evaluation of `integral G(x - y) f(y) dy`: periodic wrap
/// on the interval, zero extension of the kernel samples on the line.
pub fn direct_convolution(kernel: &Kernel, f: &Field) -> Result<Field> {
    if !kernel.grid().same_as(f.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let n = grid.len();
    let g = kernel.samples().values();
    let v = f.values();
    let dx = grid.dx();
    let periodic = grid.is_periodic();
    let mut out = vec![0.0; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (l, &fl) in v.iter().enumerate() {
            let delta = k as isize - l as isize;
            let gval = if periodic {
                g[delta.rem_euclid(n as isize) as usize]
            } else {
                // sample index of x = (k - l) * dx on the centred grid
                let idx = delta + (n / 2) as isize;
                if (0..n as isize).contains(&idx) {
                    g[idx as usize]
                } else {
                    0.0
                }
            };
            acc += gval * fl;
        }
        *slot = dx * acc;
    }
    Field::new(grid.clone(), out)
}

/// Centred five-point stencil for the fourth derivative, second-order
/// accurate; periodic wrap on the interval, zero extension on the line.
pub fn fd_fourth_derivative(f: &Field) -> Field {
    let grid = f.grid();
    let n = grid.len();
    assert!(n >= 64, "stencil check needs N >= 64");
    let v = f.values();
    let periodic = grid.is_periodic();
    let at = |i: isize| -> f64 {
        if periodic {
            v[i.rem_euclid(n as isize) as usize]
        } else if (0..n as isize).contains(&i) {
            v[i as usize]
        } else {
            0.0
        }
    };
    let scale = grid.dx().powi(4);
    let values = (0..n as isize)
        .map(|k| (at(k - 2) - 4.0 * at(k - 1) + 6.0 * at(k) - 4.0 * at(k + 1) + at(k + 2)) / scale)
        .collect();
    Field::new(grid.clone(), values).expect("stencil of finite data is finite")
}

/// Transform of the kernel samples at an arbitrary frequency, by direct
/// summation (the trigonometric interpolant of the grid spectrum).
fn transform_at(kernel: &Kernel, p: f64) -> Complex64 {
    let grid = kernel.grid();
    let dx = grid.dx();
    let x0 = grid.x()[0];
    // geometric recurrence in exp(-i p dx); phase drift is O(N eps)
    let step = Complex64::from_polar(1.0, -p * dx);
    let mut phase = Complex64::from_polar(1.0, -p * x0);
    let mut acc = Complex64::new(0.0, 0.0);
    for &g in kernel.samples().values() {
        acc += g * phase;
        phase *= step;
    }
    acc * dx / (2.0 * PI).sqrt()
}

/// Exhaustive search for the sup of both multiplier branches.
///
/// On the line: a uniform scan of `[-p_max, p_max]` with `samples` points.
/// On the interval the sup runs over integers, so every integer mode with
/// `|n| <= p_max` is visited instead. Frequencies inside the division guard
/// are skipped.
pub fn dense_sup_search(
    kernel: &Kernel,
    params: OperatorParams,
    p_max: f64,
    samples: usize,
) -> f64 {
    assert!(
        samples >= 100_000,
        "dense search needs at least 1e5 samples"
    );
    assert!(p_max > 0.0);
    let mut best = 0.0f64;
    let mut visit = |p: f64| {
        let lambda = symbol_value(p, params);
        if lambda.norm() < 1e-13 {
            return;
        }
        let g = transform_at(kernel, p).norm();
        let low = g / lambda.norm();
        let high = p.powi(4) * g / lambda.norm();
        best = best.max(low).max(high);
    };
    if kernel.grid().is_periodic() {
        let top = p_max.floor() as i64;
        for n in -top..=top {
            visit(n as f64);
        }
    } else {
        for s in 0..samples {
            let p = -p_max + 2.0 * p_max * s as f64 / (samples - 1) as f64;
            visit(p);
        }
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingReport {
    pub coarse_points: usize,
    pub fine_points: usize,
    /// Sobolev distance between the fine solution and the coarse solution
    /// interpolated onto the fine grid.
    pub h4_distance: f64,
    pub pass: bool,
}

/// Solve at N and 2N on the same physical domain and compare in the Sobolev
/// norm; a resolved solution changes negligibly under refinement.
pub fn resolution_doubling_check<B>(
    build: B,
    base: DomainSpec,
    solve_tol: f64,
    max_iter: usize,
    distance_tol: f64,
) -> Result<DoublingReport>
where
    B: Fn(DomainSpec) -> Result<ProblemConfig>,
{
    let coarse_cfg = build(base)?;
    let fine_domain = base.doubled();
    let fine_cfg = build(fine_domain)?;
    let zero_c = Field::zeros(coarse_cfg.grid().clone());
    let zero_f = Field::zeros(fine_cfg.grid().clone());
    let coarse = fixed_point_solve(&coarse_cfg, &zero_c, solve_tol, max_iter)?;
    let fine = fixed_point_solve(&fine_cfg, &zero_f, solve_tol, max_iter)?;

    let fine_grid: Arc<Grid> = Arc::new(build_grid(fine_domain)?);
    let nc = coarse_cfg.grid().len();
    let mut padded = crate::field::SpectralField::zeros(fine_grid.clone());
    // coefficients approximate the continuous transform, so they carry over
    // directly; the coarse unpaired mode is dropped
    for i in 1..nc {
        let m = coarse_cfg.grid().mode(i);
        let j = (m + (fine_grid.len() / 2) as i64) as usize;
        padded.set(j, coarse.solution_spectrum.coeffs()[i]);
    }
    let gap = fine.solution_spectrum.sub(&padded)?;
    let h4_distance = h4_norm_spectral(&gap);
    Ok(DoublingReport {
        coarse_points: nc,
        fine_points: fine_grid.len(),
        h4_distance,
        pass: h4_distance <= distance_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::NonlinearSpec;
    use crate::transform::{convolve, forward_transform, inverse_transform, spectral_derivative};

    fn interval(n: usize) -> Arc<Grid> {
        Arc::new(build_grid(DomainSpec::PeriodicInterval { points: n }).unwrap())
    }

    fn line(l: f64, n: usize) -> Arc<Grid> {
        Arc::new(
            build_grid(DomainSpec::WholeLine {
                half_width: l,
                points: n,
            })
            .unwrap(),
        )
    }

    #[test]
    fn zero_inputs_give_zero_outputs() {
        let g = interval(64);
        let kernel = Kernel::from_field(Field::zeros(g.clone()));
        let f = Field::from_fn(&g, f64::cos).unwrap();
        assert_eq!(direct_convolution(&kernel, &f).unwrap().max_abs(), 0.0);
        assert_eq!(fd_fourth_derivative(&Field::zeros(g)).max_abs(), 0.0);
    }

    #[test]
    fn direct_convolution_reproduces_cosine_identity() {
        let g = interval(128);
        let kernel = Kernel::cosine(&g, 1.0).unwrap();
        let f = Field::from_fn(&g, f64::cos).unwrap();
        let conv = direct_convolution(&kernel, &f).unwrap();
        let err = conv.sub(&f).unwrap().max_abs();
        assert!(err < 1e-12, "quadrature error {err:e}");
    }

    #[test]
    fn spectral_and_direct_convolution_agree_on_interval() {
        let g = interval(128);
        // deterministic ragged data with overlapping spectra
        let kernel = Kernel::from_field(
            Field::from_fn(&g, |x| (3.0 * x).sin() - 0.4 * (7.0 * x).cos() + 0.1).unwrap(),
        );
        let f = Field::from_fn(&g, |x| (3.0 * x).cos() + 0.3 * (7.0 * x).sin() - 0.2).unwrap();
        let fast = convolve(&kernel, &f).unwrap();
        let slow = direct_convolution(&kernel, &f).unwrap();
        let rel = fast.sub(&slow).unwrap().max_abs() / slow.max_abs().max(1e-300);
        assert!(rel < 1e-10, "relative gap {rel:e}");
    }

    #[test]
    fn spectral_and_direct_convolution_agree_on_line() {
        let g = line(16.0, 256);
        let kernel = Kernel::gaussian(&g, 1.0, 1.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp() * (2.0 * x).cos()).unwrap();
        let fast = convolve(&kernel, &f).unwrap();
        let slow = direct_convolution(&kernel, &f).unwrap();
        let rel = fast.sub(&slow).unwrap().max_abs() / slow.max_abs();
        assert!(rel < 1e-6, "relative gap {rel:e}");
    }

    #[test]
    fn gaussian_pair_matches_direct_quadrature() {
        let g = line(20.0, 512);
        let kernel = Kernel::gaussian(&g, 1.0, 1.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp()).unwrap();
        let fast = convolve(&kernel, &f).unwrap();
        let slow = direct_convolution(&kernel, &f).unwrap();
        let rel = fast.sub(&slow).unwrap().max_abs() / slow.max_abs();
        assert!(rel < 1e-10, "relative gap {rel:e}");
    }

    #[test]
    fn stencil_derivative_of_sine() {
        let g = interval(256);
        let f = Field::from_fn(&g, f64::sin).unwrap();
        let d4 = fd_fourth_derivative(&f);
        let err = d4.sub(&f).unwrap().max_abs();
        let dx = g.dx();
        assert!(
            err < dx * dx,
            "stencil error {err:e} vs O(dx^2) = {:e}",
            dx * dx
        );
    }

    #[test]
    fn stencil_cross_checks_spectral_derivative() {
        let g = interval(256);
        let f = Field::from_fn(&g, |x| (2.0 * x).sin()).unwrap();
        let spectral = inverse_transform(&spectral_derivative(&forward_transform(&f), 4)).unwrap();
        let stencil = fd_fourth_derivative(&f);
        let rel = spectral.sub(&stencil).unwrap().max_abs() / spectral.max_abs();
        assert!(rel < 1e-3, "relative gap {rel:e}");
    }

    #[test]
    fn dense_search_zero_kernel() {
        let g = line(10.0, 128);
        let kernel = Kernel::from_field(Field::zeros(g));
        let params = OperatorParams::new(1.0, 1.0).unwrap();
        assert_eq!(dense_sup_search(&kernel, params, 10.0, 100_000), 0.0);
    }

    #[test]
    fn dense_search_monotone_in_p_max() {
        // sample counts chosen so the narrow scan grid nests inside the wide
        // one, making the sup over the larger set exactly dominant
        let g = line(16.0, 256);
        let kernel = Kernel::gaussian(&g, 1.0, 1.0).unwrap();
        let params = OperatorParams::new(1.0, 1.0).unwrap();
        let narrow = dense_sup_search(&kernel, params, 2.0, 100_001);
        let wide = dense_sup_search(&kernel, params, 8.0, 400_001);
        assert!(wide >= narrow);
    }

    #[test]
    fn doubling_check_flat_for_band_limited_solution() {
        let build = |d: DomainSpec| -> Result<ProblemConfig> {
            let grid = Arc::new(build_grid(d)?);
            let kernel = Kernel::cosine(&grid, 1.0)?;
            let spec = NonlinearSpec::sine(&grid, 0.2, f64::cos, true)?;
            ProblemConfig::new(OperatorParams::new(1.0, 1.0)?, kernel, spec, 0.2)
        };
        let report = resolution_doubling_check(
            build,
            DomainSpec::PeriodicInterval { points: 64 },
            1e-11,
            80,
            1e-8,
        )
        .unwrap();
        assert!(report.pass, "distance {:e}", report.h4_distance);
    }

    #[test]
    fn doubling_check_flags_unresolved_source() {
        // mode 40 aliases on the N = 64 grid and resolves only on the fine
        // one, so the two solutions disagree
        let build = |d: DomainSpec| -> Result<ProblemConfig> {
            let grid = Arc::new(build_grid(d)?);
            let kernel = Kernel::from_field(Field::from_fn(&grid, |x| (40.0 * x).cos() / PI)?);
            let spec = NonlinearSpec::source(&grid, |x| (40.0 * x).cos(), true)?;
            ProblemConfig::new(OperatorParams::new(1.0, 1.0)?, kernel, spec, 0.2)
        };
        let report = resolution_doubling_check(
            build,
            DomainSpec::PeriodicInterval { points: 64 },
            1e-11,
            80,
            1e-8,
        )
        .unwrap();
        assert!(!report.pass, "under-resolved case must be flagged");
        assert!(report.h4_distance > 1e-3);
    }
}
