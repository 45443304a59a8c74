use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square with dimension >= 1 (got {rows}x{cols})")]
    BadShape { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("eigen-solver did not converge (dim {dim}, condition estimate {condition_estimate:.3e})")]
    EigenNonConvergence { dim: usize, condition_estimate: f64 },

    #[error("operator is not boundedly invertible: lambda_min {lambda_min:.3e} <= cutoff {cutoff:.3e}")]
    NotInvertible { lambda_min: f64, cutoff: f64 },

    #[error("operator is not positive semidefinite: lambda_min {lambda_min:.3e}")]
    NotPositive { lambda_min: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("invalid spectral bounds: m = {m}, M = {big_m}")]
    InvalidBounds { m: f64, big_m: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("strategy/kind mismatch: {0}")]
    StrategyMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
