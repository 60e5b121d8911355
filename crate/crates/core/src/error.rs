//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors raised by panel construction, simulation, and estimation.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An index (series or time) was outside the valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A parameter violated its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A data invariant was violated (non-finite values, duplicate ids, ...).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Covariance construction or factorization failed.
    #[error("covariance construction failed: {0}")]
    CovarianceConstruction(String),

    /// An operation requires a generative spec that was not supplied.
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    /// Hypothesis input length does not match the class window.
    #[error("dimension mismatch: expected input of length >= {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// File or serialization problem.
    #[error("io error: {0}")]
    Io(String),

    /// CSV or JSON content could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CoreError {
    fn from(e: serde_json::Error) -> Self {
        CoreError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
