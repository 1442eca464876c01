use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bidrift_bench::{benchmark_problem, interval_grid, line_grid, wave_packet};
use bidrift_core::{
    compute_n, convolve, fixed_point_solve, forward_transform, inverse_transform, Field, Kernel,
    OperatorParams,
};

fn transforms(c: &mut Criterion) {
    let grid = interval_grid(1024);
    let f = wave_packet(&grid);
    c.bench_function("roundtrip_interval_1024", |b| {
        b.iter(|| inverse_transform(&forward_transform(black_box(&f))).unwrap())
    });
    let grid = line_grid(20.0, 1024);
    let f = wave_packet(&grid);
    c.bench_function("roundtrip_line_1024", |b| {
        b.iter(|| inverse_transform(&forward_transform(black_box(&f))).unwrap())
    });
}

fn convolution(c: &mut Criterion) {
    let grid = line_grid(20.0, 1024);
    let kernel = Kernel::gaussian(&grid, 1.0, 1.0).unwrap();
    let f = wave_packet(&grid);
    c.bench_function("convolve_line_1024", |b| {
        b.iter(|| convolve(black_box(&kernel), black_box(&f)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let problem = benchmark_problem(256);
    let zero = Field::zeros(problem.grid().clone());
    c.bench_function("fixed_point_interval_256", |b| {
        b.iter(|| fixed_point_solve(black_box(&problem), &zero, 1e-10, 60).unwrap())
    });
}

fn multiplier_analysis(c: &mut Criterion) {
    let grid = line_grid(20.0, 2048);
    let kernel = Kernel::gaussian(&grid, 1.0, 1.0).unwrap();
    let params = OperatorParams::new(1.0, 1.0).unwrap();
    c.bench_function("compute_n_line_2048", |b| {
        b.iter(|| compute_n(black_box(&kernel), params, &grid).unwrap())
    });
}

criterion_group!(
    benches,
    transforms,
    convolution,
    solver,
    multiplier_analysis
);
criterion_main!(benches);
