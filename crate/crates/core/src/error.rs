//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a precondition (empty input, bad parameter).
    #[error("usage error: {0}")]
    Usage(String),
    /// Equation data is inconsistent (unknown label, missing registration).
    #[error("equation spec error: {0}")]
    Spec(String),
    /// Request falls outside what the implementation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },
    /// A reference computation could not certify its own accuracy.
    #[error("oracle failure: {0}")]
    Oracle(String),
    /// Experiment configuration rejected before running.
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
