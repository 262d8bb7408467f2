use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum HeisError {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("solver did not converge after {iterations} iterations (best value {best_value}, residual {residual:e})")]
    Convergence {
        iterations: usize,
        best_value: f64,
        residual: f64,
        best_vector: Vec<f64>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("spin labeling failed: Casimir eigenvalue {value} is not of the form s(s+1)")]
    Labeling { value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = HeisError> = std::result::Result<T, E>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(HeisError::Argument(msg.into()))
}
