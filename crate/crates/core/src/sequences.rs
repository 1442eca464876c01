//! Kernel families `G_m -> G` and the harness that verifies convergence of
//! the induced multipliers, sup constants, and solutions as `m` grows.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::kernel::Kernel;
use crate::nonlinearity::{evaluate_field, NonlinearSpec};
use crate::norms::{first_moment_l1, h4_norm_spectral, l1_norm, l2_norm, l2_norm_spectral};
use crate::solver::{contraction_constant, fixed_point_solve, ProblemConfig, SolveReport};
use crate::symbol::{check_solvability, compute_n, multiplier, OperatorParams};

type GeneratorFn = Arc<dyn Fn(u32) -> Kernel + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceMode {
    Scaling,
    Mollification,
    Perturbation,
}

/// A family of approximating kernels sharing the limit's grid.
#[derive(Clone)]
pub struct KernelSequence {
    limit: Kernel,
    mode: SequenceMode,
    generator: GeneratorFn,
}

impl std::fmt::Debug for KernelSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelSequence")
            .field("mode", &self.mode)
            .finish()
    }
}

impl KernelSequence {
    /// `G_m = (1 + c/m) G`; distances to the limit scale exactly like `1/m`.
    pub fn scaling(limit: Kernel, c: f64) -> KernelSequence {
        let base = limit.clone();
        KernelSequence {
            limit,
            mode: SequenceMode::Scaling,
            generator: Arc::new(move |m| base.scaled(1.0 + c / m as f64)),
        }
    }

    /// Gaussian smoothing of width `1/m`; preserves the kernel mean, so the
    /// orthogonality gate survives along the family.
    pub fn mollification(limit: Kernel) -> KernelSequence {
        let base = limit.clone();
        KernelSequence {
            limit,
            mode: SequenceMode::Mollification,
            generator: Arc::new(move |m| base.mollified(1.0 / m as f64)),
        }
    }

    /// `G_m = G + (c/m) D` with the direction projected to zero mean, so a
    /// zero-mean limit stays zero-mean along the family.
    pub fn perturbation(limit: Kernel, direction: &Kernel, c: f64) -> Result<KernelSequence> {
        if !limit.grid().same_as(direction.grid()) {
            return Err(Error::GridMismatch);
        }
        let direction = direction.project_zero_mean();
        let base = limit.clone();
        Ok(KernelSequence {
            limit,
            mode: SequenceMode::Perturbation,
            generator: Arc::new(move |m| {
                base.add_scaled(&direction, c / m as f64)
                    .expect("shared grid")
            }),
        })
    }

    pub fn limit(&self) -> &Kernel {
        &self.limit
    }

    pub fn mode(&self) -> SequenceMode {
        self.mode
    }

    pub fn member(&self, m: u32) -> Kernel {
        assert!(m >= 1, "family index starts at 1");
        (self.generator)(m)
    }
}

/// Per-member kernel and multiplier distances to the limit.
#[derive(Debug, Clone, Serialize)]
pub struct KernelConvergenceRow {
    pub m: u32,
    pub l1_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_distance: Option<f64>,
    pub multiplier_sup_distance: f64,
    pub multiplier_high_sup_distance: f64,
    pub n_value_m: f64,
    pub n_value_gap: f64,
}

fn prepared_multiplier(
    kernel: &Kernel,
    params: OperatorParams,
    grid: &Grid,
) -> Result<(Kernel, SpectralField)> {
    let kernel = if params.a() == 0.0 {
        let gate = check_solvability(kernel, params);
        if !gate.solvable {
            return Err(Error::SolvabilityGate {
                residual: gate.orthogonality_residual,
                tolerance: crate::symbol::orthogonality_tolerance(kernel),
            });
        }
        kernel.project_zero_mean()
    } else {
        kernel.clone()
    };
    let m = multiplier(&kernel, params, grid)?;
    Ok((kernel, m))
}

fn member_error(m: u32, err: Error) -> Error {
    Error::SequenceMember {
        m,
        detail: err.to_string(),
    }
}

/// Kernel-level convergence: L1 (and first-moment, line) distances plus the
/// sup distances of both multiplier branches and the gap `|N_m - N|`.
pub fn kernel_convergence_report(
    seq: &KernelSequence,
    params: OperatorParams,
    m_list: &[u32],
) -> Result<Vec<KernelConvergenceRow>> {
    if m_list.is_empty() {
        return Err(Error::Config("m_list must be nonempty".into()));
    }
    let grid = seq.limit().grid().clone();
    let (limit_kernel, limit_mult) = prepared_multiplier(seq.limit(), params, &grid)?;
    let limit_n = compute_n(&limit_kernel, params, &grid)?.n_value;
    let on_line = !grid.is_periodic();
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let member = seq.member(m);
        let diff = member
            .samples()
            .sub(seq.limit().samples())
            .map_err(|e| member_error(m, e))?;
        let l1_distance = l1_norm(&diff);
        let moment_distance = on_line.then(|| first_moment_l1(&diff));
        let (member_kernel, member_mult) =
            prepared_multiplier(&member, params, &grid).map_err(|e| member_error(m, e))?;
        let gap = member_mult
            .sub(&limit_mult)
            .map_err(|e| member_error(m, e))?;
        let freq = grid.freq();
        let mut sup = 0.0f64;
        let mut sup_high = 0.0f64;
        for (i, c) in gap.coeffs().iter().enumerate() {
            sup = sup.max(c.norm());
            sup_high = sup_high.max(freq[i].powi(4) * c.norm());
        }
        let n_value_m = compute_n(&member_kernel, params, &grid)
            .map_err(|e| member_error(m, e))?
            .n_value;
        rows.push(KernelConvergenceRow {
            m,
            l1_distance,
            moment_distance,
            multiplier_sup_distance: sup,
            multiplier_high_sup_distance: sup_high,
            n_value_m,
            n_value_gap: (n_value_m - limit_n).abs(),
        });
    }
    Ok(rows)
}

/// Uniform contraction audit: `2 sqrt(pi) N_m l <= 1 - epsilon` for every
/// listed member, and the limit kernel inherits the same bound.
#[derive(Debug, Clone, Serialize)]
pub struct UniformContractionReport {
    pub threshold: f64,
    pub per_m: Vec<(u32, f64)>,
    pub limit_q: f64,
    pub pass: bool,
}

pub fn uniform_contraction_check(
    seq: &KernelSequence,
    params: OperatorParams,
    lipschitz_l: f64,
    epsilon: f64,
    m_list: &[u32],
) -> Result<UniformContractionReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!(
            "epsilon {epsilon} must lie in (0, 1)"
        )));
    }
    let grid = seq.limit().grid().clone();
    let threshold = 1.0 - epsilon;
    let mut per_m = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let member = seq.member(m);
        let report = compute_n(&member, params, &grid).map_err(|e| member_error(m, e))?;
        let q = contraction_constant(report.n_value, lipschitz_l);
        if q > threshold || q.is_nan() {
            return Err(Error::UniformContraction {
                m,
                q,
                limit: threshold,
            });
        }
        per_m.push((m, q));
    }
    let limit_report = compute_n(seq.limit(), params, &grid)?;
    let limit_q = contraction_constant(limit_report.n_value, lipschitz_l);
    if limit_q > threshold || limit_q.is_nan() {
        return Err(Error::UniformContraction {
            m: 0,
            q: limit_q,
            limit: threshold,
        });
    }
    Ok(UniformContractionReport {
        threshold,
        per_m,
        limit_q,
        pass: true,
    })
}

/// One row of the sequence study: kernel distances, the member's sup
/// constant, solution distances to the limit solution, and the proof-side
/// ceiling on the L2 distance.
#[derive(Debug, Clone, Serialize)]
pub struct SequenceRow {
    pub m: u32,
    pub l1_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_distance: Option<f64>,
    pub multiplier_sup_distance: f64,
    pub multiplier_high_sup_distance: f64,
    pub n_value_m: f64,
    pub solution_l2_distance: f64,
    pub solution_h4_distance: f64,
    /// `sqrt(2*pi)/epsilon * sup|M_m - M| * ||F(u, .)||_L2`.
    pub theorem_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub mode: SequenceMode,
    pub epsilon_margin: f64,
    pub per_m: Vec<SequenceRow>,
    /// Least-squares slope of `log d_H4` against `log m`, when measurable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_h4_slope: Option<f64>,
    pub limit_solution: SolveReport,
}

#[derive(Debug, Clone, Copy)]
pub struct SequenceSolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Worker threads for the per-member solves; members are independent and
    /// the report order is fixed by `m_list` regardless.
    pub parallelism: usize,
}

impl Default for SequenceSolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            parallelism: 1,
        }
    }
}

/// Solve every member problem and the limit problem, and measure the
/// distances the convergence theory controls.
pub fn sequence_solve(
    seq: &KernelSequence,
    params: OperatorParams,
    nonlinearity: &NonlinearSpec,
    epsilon_margin: f64,
    m_list: &[u32],
    opts: &SequenceSolveOptions,
) -> Result<SequenceReport> {
    if m_list.is_empty() {
        return Err(Error::Config("m_list must be nonempty".into()));
    }
    let grid = seq.limit().grid().clone();
    let limit_config = ProblemConfig::new(
        params,
        seq.limit().clone(),
        nonlinearity.clone(),
        epsilon_margin,
    )?;
    let zero = crate::field::Field::zeros(grid.clone());
    let limit_solution = fixed_point_solve(&limit_config, &zero, opts.tol, opts.max_iter)?;
    let f_limit = evaluate_field(nonlinearity, &limit_solution.solution)?;
    let f_limit_l2 = l2_norm(&f_limit);

    let kernel_rows = kernel_convergence_report(seq, params, m_list)?;

    let solve_member = |m: u32| -> Result<(f64, f64)> {
        let config =
            ProblemConfig::new(params, seq.member(m), nonlinearity.clone(), epsilon_margin)
                .map_err(|e| member_error(m, e))?;
        let zero = crate::field::Field::zeros(grid.clone());
        let report = fixed_point_solve(&config, &zero, opts.tol, opts.max_iter)
            .map_err(|e| member_error(m, e))?;
        let gap = report
            .solution_spectrum
            .sub(&limit_solution.solution_spectrum)
            .map_err(|e| member_error(m, e))?;
        Ok((l2_norm_spectral(&gap), h4_norm_spectral(&gap)))
    };

    let distances: Vec<Result<(f64, f64)>> = if opts.parallelism > 1 {
        let chunk = m_list.len().div_ceil(opts.parallelism);
        let mut out: Vec<Option<Result<(f64, f64)>>> = (0..m_list.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut slots = out.as_mut_slice();
            let mut handles = Vec::new();
            for ms in m_list.chunks(chunk) {
                let (head, rest) = slots.split_at_mut(ms.len());
                slots = rest;
                let solve = &solve_member;
                handles.push(scope.spawn(move || {
                    for (slot, &m) in head.iter_mut().zip(ms) {
                        *slot = Some(solve(m));
                    }
                }));
            }
            for h in handles {
                h.join().expect("sequence worker panicked");
            }
        });
        out.into_iter().map(|r| r.expect("slot filled")).collect()
    } else {
        m_list.iter().map(|&m| solve_member(m)).collect()
    };

    let root_2pi = (2.0 * std::f64::consts::PI).sqrt();
    let mut per_m = Vec::with_capacity(m_list.len());
    for (row, dist) in kernel_rows.into_iter().zip(distances) {
        let (l2_d, h4_d) = dist?;
        per_m.push(SequenceRow {
            m: row.m,
            l1_distance: row.l1_distance,
            moment_distance: row.moment_distance,
            multiplier_sup_distance: row.multiplier_sup_distance,
            multiplier_high_sup_distance: row.multiplier_high_sup_distance,
            n_value_m: row.n_value_m,
            solution_l2_distance: l2_d,
            solution_h4_distance: h4_d,
            theorem_bound: root_2pi / epsilon_margin * row.multiplier_sup_distance * f_limit_l2,
        });
    }
    let fitted_h4_slope = fit_log_slope(
        &per_m
            .iter()
            .map(|r| (r.m as f64, r.solution_h4_distance))
            .collect::<Vec<_>>(),
    );
    Ok(SequenceReport {
        mode: seq.mode(),
        epsilon_margin,
        per_m,
        fitted_h4_slope,
        limit_solution,
    })
}

fn fit_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, d)| *d > 1e-13)
        .map(|&(m, d)| (m.ln(), d.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in &logs {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    (var > 0.0).then(|| cov / var)
}
