use thiserror::Error;

/// Errors shared across the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("non-finite value {value} at node {index} (x = {x})")]
    NonFinite { index: usize, x: f64, value: f64 },
    #[error("coefficients break Hermitian symmetry: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("orthogonality gate failed for a = 0: |(G, 1)| = {residual:e} exceeds tolerance {tolerance:e}")]
    SolvabilityGate { residual: f64, tolerance: f64 },
    #[error("|symbol| = {magnitude:e} at p = {frequency} is below the division guard")]
    DivisionGuard { frequency: f64, magnitude: f64 },
    #[error("contraction constant q = {q} exceeds 1 - epsilon = {limit}; iteration refused")]
    ContractionViolation { q: f64, limit: f64 },
    #[error("uniform contraction fails at m = {m}: q = {q} exceeds {limit}")]
    UniformContraction { m: u32, q: f64, limit: f64 },
    #[error("sequence member m = {m}: {detail}")]
    SequenceMember { m: u32, detail: String },
    #[error("no convergence within {max_iter} iterations; last step {last_step:e}")]
    MaxIterations { max_iter: usize, last_step: f64 },
    #[error(
        "diverging iteration at step {iteration} ({growing} growing steps); \
         declared Lipschitz constant {declared_l} vs audited sample ratio {audited_ratio}"
    )]
    Divergence {
        iteration: usize,
        growing: usize,
        declared_l: f64,
        audited_ratio: f64,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
