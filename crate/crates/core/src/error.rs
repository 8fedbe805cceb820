use thiserror::Error;

/// Errors raised by the estimation and testing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite: pivot {pivot} = {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("non-normalizable model: {0}")]
    NonNormalizable(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("model infeasible: {0}")]
    Infeasible(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A request that cannot be satisfied with the supplied configuration,
    /// e.g. a critical-value table miss without a simulation budget.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
