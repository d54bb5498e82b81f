//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by simulation, estimation, selection, and fitting routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data cannot belong to the assumed model (e.g. nonpositive
    /// increments fed to a Gamma likelihood).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// The sample is too small for the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The fit grid carries no information (e.g. zero x-variance).
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    /// The sample carries no information (e.g. all values equal).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// No model in the collection satisfies the admissibility bound.
    #[error("no admissible model: {0}")]
    EmptyAdmissible(String),

    /// A numeric routine failed to converge; the message carries diagnostics.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Malformed input file.
    #[error("data error: {0}")]
    Data(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
