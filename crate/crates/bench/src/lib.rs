//! Shared input builders for the criterion benchmarks.

use std::sync::Arc;

use bidrift_core::{
    build_grid, DomainSpec, Field, Grid, Kernel, NonlinearSpec, OperatorParams, ProblemConfig,
};

pub fn interval_grid(n: usize) -> Arc<Grid> {
    Arc::new(build_grid(DomainSpec::PeriodicInterval { points: n }).expect("valid domain"))
}

pub fn line_grid(half_width: f64, n: usize) -> Arc<Grid> {
    Arc::new(
        build_grid(DomainSpec::WholeLine {
            half_width,
            points: n,
        })
        .expect("valid domain"),
    )
}

pub fn wave_packet(grid: &Arc<Grid>) -> Field {
    Field::from_fn(grid, |x| {
        let envelope = if grid.is_periodic() {
            1.0
        } else {
            (-x * x / 16.0).exp()
        };
        envelope * ((3.0 * x).cos() + 0.4 * (5.0 * x).sin())
    })
    .expect("finite samples")
}

/// The nonlinear interval benchmark: cosine kernel, sinusoidal nonlinearity.
pub fn benchmark_problem(n: usize) -> ProblemConfig {
    let grid = interval_grid(n);
    let kernel = Kernel::cosine(&grid, 1.0).expect("interval kernel");
    let spec = NonlinearSpec::sine(&grid, 0.2, f64::cos, true).expect("valid constants");
    ProblemConfig::new(
        OperatorParams::new(1.0, 1.0).expect("valid"),
        kernel,
        spec,
        0.2,
    )
    .expect("benchmark problem is solvable")
}
