use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("invalid inversion plan: {0}")]
    PlanInvalid(String),
    #[error("accuracy target missed: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e} ({context})")]
    Accuracy {
        estimate: f64,
        tolerance: f64,
        context: String,
    },
    #[error("branch discontinuity: {0}")]
    Branch(String),
    #[error("outside asymptotic regime: {0}")]
    Regime(String),
    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),
    #[error("insufficient cumulants: need {needed}, have {have}")]
    InsufficientCumulants { needed: usize, have: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
