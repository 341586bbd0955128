//! Error taxonomy shared by every module.
//!
//! The four categories map one-to-one onto CLI exit codes: validation = 2,
//! capacity = 3, convergence = 4, domain = 5.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: wrong shape, broken invariant, out-of-range parameter.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input is well-formed but exceeds an explicit size limit.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// An iterative routine exhausted its budget. Carries the best value
    /// reached and the stationarity residual at that point.
    #[error("convergence error: {message} (best value {best}, residual {residual:.3e})")]
    Convergence {
        message: String,
        best: f64,
        residual: f64,
    },

    /// Inputs outside the mathematical domain of the operation
    /// (support violations, precondition windows, zero variance).
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Exit-code category used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 2,
            Error::Capacity(_) => 3,
            Error::Convergence { .. } => 4,
            Error::Domain(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
