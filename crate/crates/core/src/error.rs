use thiserror::Error;

/// Errors raised by the numerical routines and the spec-string parsers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A weight sequence was read past its stored length and has no generator.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// An iteration failed to converge or produced non-finite values.
    /// `best_so_far` carries the best objective value seen, when one exists.
    #[error("numerical failure: {message}")]
    NumericalFailure {
        message: String,
        best_so_far: Option<f64>,
    },

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("divergent tail: {0}")]
    DivergentTail(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        Error::NumericalFailure {
            message: message.into(),
            best_so_far: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
