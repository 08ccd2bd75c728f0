use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch-point singularity at x = {0}")]
    BranchPoint(Complex64),

    #[error("degenerate polynomial: {0}")]
    Degenerate(String),

    #[error("leading coefficient underflow (|c_n| = {0:e})")]
    Scaling(f64),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("Im z does not change sign for {label} on [{lo}, {hi}]")]
    Bracketing { label: String, lo: f64, hi: f64 },

    #[error("sweep failed: {gaps} of {total} rows unsolved")]
    TooManyGaps { gaps: usize, total: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("time step {dt} exceeds stability bound {bound}")]
    Stability { dt: f64, bound: f64 },

    #[error("matrix of dimension {dim} ({entries} entries) exceeds the memory guard")]
    TooLarge { dim: usize, entries: usize },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("amplitude underflow in fit window at t = {0}")]
    Underflow(f64),
}
