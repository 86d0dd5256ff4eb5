use thiserror::Error;

/// Errors raised by the tensor, factorization and integration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("mode {mode} out of range for an order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid rank: {0}")]
    InvalidRank(String),

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("Gram matrix is numerically singular (condition estimate {condition:e})")]
    SingularGram { condition: f64 },

    #[error("matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("request not feasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
