//! Command-line front end: analyze | solve | sequence | oracle.
//!
//! Exit codes classify failures by which hypothesis broke:
//! 0 success, 1 configuration or I/O problem, 2 orthogonality gate,
//! 3 contraction condition, 4 non-convergence.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

use bidrift_core::io::write_field_csv;
use bidrift_core::oracle::{
    dense_sup_search, direct_convolution, fd_fourth_derivative, resolution_doubling_check,
    DoublingReport,
};
use bidrift_core::{
    check_solvability, compute_n, convolve, evaluate_field, fixed_point_solve, forward_transform,
    inverse_transform, linear_solve, nontriviality_check, sequence_solve, spectral_derivative,
    truncation_check, uniform_contraction_check, verify_constants, Error, Field, MultiplierReport,
    NontrivialityReport, SequenceReport, SequenceSolveOptions, SolveReport, TruncationReport,
    UniformContractionReport, VerificationReport, TRUNCATION_THRESHOLD,
};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "bidrift",
    version,
    about = "Spectral solver for nonlocal fourth-order stationary equations with drift"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration's output_dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sequence runs.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
    /// Seed for the sampling audit of the nonlinearity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solvability gate and multiplier sup constants.
    Analyze,
    /// Fixed-point solve with contraction diagnostics.
    Solve,
    /// Kernel-family study: per-member solves and convergence distances.
    Sequence,
    /// Cross-checks of the fast paths against brute-force references.
    Oracle,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = match &err {
            Error::SolvabilityGate { .. } => 2,
            Error::ContractionViolation { .. } | Error::UniformContraction { .. } => 3,
            Error::MaxIterations { .. } | Error::Divergence { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let config_path = cli.config.as_deref().ok_or_else(|| Failure {
        code: 1,
        message: "--config <path> is required".into(),
    })?;
    let config = RunConfig::load(config_path)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Analyze => run_analyze(&config, &out_dir, cli.seed),
        Command::Solve => run_solve(&config, &out_dir, cli.seed),
        Command::Sequence => run_sequence(&config, &out_dir, cli.seed, cli.parallel.max(1)),
        Command::Oracle => run_oracle(&config, &out_dir, cli.seed),
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    command: &'static str,
    seed: u64,
    timestamp_unix_s: u64,
    report: T,
}

fn emit<T: Serialize>(
    command: &'static str,
    seed: u64,
    out_dir: &Path,
    report: T,
) -> Result<(), Failure> {
    let envelope = Envelope {
        command,
        seed,
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        report,
    };
    let text = serde_json::to_string_pretty(&envelope).map_err(Error::from)?;
    fs::create_dir_all(out_dir).map_err(Error::from)?;
    fs::write(out_dir.join("report.json"), &text).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

fn run_analyze(config: &RunConfig, out_dir: &Path, seed: u64) -> Result<ExitCode, Failure> {
    let grid = config.grid()?;
    let params = config.operator_params()?;
    let kernel = config.kernel(&grid)?;
    let gate = check_solvability(&kernel, params);
    let kernel = if params.a() == 0.0 && gate.solvable {
        kernel.project_zero_mean()
    } else {
        kernel
    };
    let report = compute_n(&kernel, params, &grid)?;
    let solvable = report.solvable;
    emit("analyze", seed, out_dir, &report)?;
    Ok(if solvable {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
struct SolvePayload<'a> {
    multiplier: &'a MultiplierReport,
    constants_audit: VerificationReport,
    nontriviality: NontrivialityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<TruncationReport>,
    solve: &'a SolveReport,
}

/// Sampling radius for the audit: ten times the a-priori amplitude bound
/// `||t(0)|| / (1 - q)` of the fixed point.
fn audit_radius(problem: &bidrift_core::ProblemConfig) -> Result<f64, Failure> {
    let zero = Field::zeros(problem.grid().clone());
    let first = linear_solve(problem, &zero)?;
    let q = problem.q_bound().min(0.9);
    Ok((10.0 * bidrift_core::h4_norm(&first) / (1.0 - q)).max(1.0))
}

fn run_solve(config: &RunConfig, out_dir: &Path, seed: u64) -> Result<ExitCode, Failure> {
    let problem = config.problem()?;
    let radius = audit_radius(&problem)?;
    let audit = verify_constants(problem.nonlinearity(), (-radius, radius), 10_000, seed);
    let nontriviality = nontriviality_check(&problem)?;
    let truncation = truncation_check(&problem, TRUNCATION_THRESHOLD)?;
    let zero = Field::zeros(problem.grid().clone());
    let solve = fixed_point_solve(&problem, &zero, config.tol, config.max_iter)?;
    fs::create_dir_all(out_dir).map_err(Error::from)?;
    let csv = fs::File::create(out_dir.join("solution.csv")).map_err(Error::from)?;
    write_field_csv(&solve.solution, std::io::BufWriter::new(csv))?;
    emit(
        "solve",
        seed,
        out_dir,
        SolvePayload {
            multiplier: problem.multiplier_report(),
            constants_audit: audit,
            nontriviality,
            truncation,
            solve: &solve,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SequencePayload<'a> {
    uniform_contraction: &'a UniformContractionReport,
    sequence: &'a SequenceReport,
}

fn run_sequence(
    config: &RunConfig,
    out_dir: &Path,
    seed: u64,
    parallelism: usize,
) -> Result<ExitCode, Failure> {
    let grid = config.grid()?;
    let params = config.operator_params()?;
    let nonlinearity = config.nonlinearity(&grid)?;
    let (seq, m_list) = config.sequence(&grid)?;
    let uniform = uniform_contraction_check(
        &seq,
        params,
        nonlinearity.lipschitz_l(),
        config.epsilon_margin,
        &m_list,
    )?;
    let report = sequence_solve(
        &seq,
        params,
        &nonlinearity,
        config.epsilon_margin,
        &m_list,
        &SequenceSolveOptions {
            tol: config.tol,
            max_iter: config.max_iter,
            parallelism,
        },
    )?;
    fs::create_dir_all(out_dir).map_err(Error::from)?;
    let mut csv = String::from(
        "m,l1_distance,moment_distance,multiplier_sup_distance,multiplier_high_sup_distance,n_value_m,solution_l2_distance,solution_h4_distance,theorem_bound\n",
    );
    for row in &report.per_m {
        let moment = row
            .moment_distance
            .map(|v| format!("{v:.15e}"))
            .unwrap_or_default();
        csv.push_str(&format!(
            "{},{:.15e},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
            row.m,
            row.l1_distance,
            moment,
            row.multiplier_sup_distance,
            row.multiplier_high_sup_distance,
            row.n_value_m,
            row.solution_l2_distance,
            row.solution_h4_distance,
            row.theorem_bound,
        ));
    }
    fs::write(out_dir.join("sequence.csv"), csv).map_err(Error::from)?;
    let csv = fs::File::create(out_dir.join("solution.csv")).map_err(Error::from)?;
    write_field_csv(
        &report.limit_solution.solution,
        std::io::BufWriter::new(csv),
    )?;
    emit(
        "sequence",
        seed,
        out_dir,
        SequencePayload {
            uniform_contraction: &uniform,
            sequence: &report,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OraclePayload {
    convolution_rel_error: f64,
    fd4_rel_error: f64,
    n_value: f64,
    dense_sup: f64,
    n_rel_error: f64,
    resolution_doubling: DoublingReport,
}

fn run_oracle(config: &RunConfig, out_dir: &Path, seed: u64) -> Result<ExitCode, Failure> {
    let n = config.domain.points();
    if n > 1024 {
        return Err(Failure {
            code: 1,
            message: format!("oracle cross-checks are capped at N <= 1024, got {n}"),
        });
    }
    if n < 64 {
        return Err(Failure {
            code: 1,
            message: format!("oracle cross-checks need N >= 64, got {n}"),
        });
    }
    let problem = config.problem()?;
    let grid = problem.grid().clone();

    // probe field: the data term of the equation, or a fixed smooth packet
    // when that is identically zero
    let zero = Field::zeros(grid.clone());
    let mut probe = evaluate_field(problem.nonlinearity(), &zero)?;
    if probe.max_abs() == 0.0 {
        probe = Field::from_fn(&grid, |x| {
            let envelope = if grid.is_periodic() {
                1.0
            } else {
                (-x * x).exp()
            };
            envelope * ((3.0 * x).cos() + 0.5 * x.sin())
        })?;
    }

    let fast = convolve(problem.kernel(), &probe)?;
    let slow = direct_convolution(problem.kernel(), &probe)?;
    let scale = slow.max_abs().max(1e-300);
    let convolution_rel_error = fast.sub(&slow)?.max_abs() / scale;

    let spectral = inverse_transform(&spectral_derivative(&forward_transform(&probe), 4))?;
    let stencil = fd_fourth_derivative(&probe);
    let fd4_rel_error = spectral.sub(&stencil)?.max_abs() / spectral.max_abs().max(1e-300);

    let params = problem.params();
    let n_value = problem.multiplier_report().n_value;
    let p_max = grid.max_freq().min(50.0);
    let dense_sup = dense_sup_search(problem.kernel(), params, p_max, 200_000);
    let n_rel_error = (n_value - dense_sup).abs() / dense_sup.max(1e-300);

    let resolution_doubling = resolution_doubling_check(
        |domain| config.problem_on(domain),
        config.domain,
        config.tol,
        config.max_iter,
        config.doubling_tol,
    )?;

    emit(
        "oracle",
        seed,
        out_dir,
        OraclePayload {
            convolution_rel_error,
            fd4_rel_error,
            n_value,
            dense_sup,
            n_rel_error,
            resolution_doubling,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}
