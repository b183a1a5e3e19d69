use thiserror::Error;

/// Errors raised by geometry, coding and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant failed at run time (for example a collapsed orbit lattice).
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// A spanning target had no candidate within the requested radius.
    #[error("target #{index} cannot be covered at radius {epsilon}")]
    Uncoverable { index: usize, epsilon: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
