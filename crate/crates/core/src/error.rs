//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A symmetric factorization failed even after the diagonal jitter
    /// escalated to its ceiling. Usually means near-duplicate locations or a
    /// wildly scaled covariance.
    #[error("matrix factorization failed after jitter escalation ({context})")]
    IllConditioned { context: String },

    #[error("length mismatch: {what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("upper truncation bound rejected {0} consecutive draws; bound is likely misconfigured")]
    TruncationExhausted(usize),

    #[error("operation requires draws from the {expected} model, got {got}")]
    ModelMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("simulation produced no retained points in {0} attempts (degenerate regime)")]
    DegenerateSimulation(u32),

    #[error("cross-validation fold {0} has no training points")]
    EmptyFold(usize),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("sampler failed at iteration {iteration}: {source}")]
    Sampler {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}

/// Finite and strictly positive; rejects NaN.
pub(crate) fn is_positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}
