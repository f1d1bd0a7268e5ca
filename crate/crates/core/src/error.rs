use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry in matrix or vector")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("not a valid quantum channel: {0}")]
    InvalidChannel(String),

    #[error("Lindblad operator has Schatten-2 norm {norm:.6}, expected 1; use rescale_task to normalize it")]
    NormViolation { norm: f64 },

    #[error("dimension {d} exceeds the limit {limit} for this configuration")]
    DimensionLimit { d: usize, limit: usize },

    #[error("numerical drift {drift:.3e} exceeds {limit:.1e}; the step is broken")]
    Drift { drift: f64, limit: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
