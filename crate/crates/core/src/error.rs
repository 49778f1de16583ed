use thiserror::Error;

/// Errors raised by the spectral laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(
        "spectrum budget exceeded: Weyl estimate of {estimate:.0} eigenvalues below {cutoff} exceeds the cap of {cap}"
    )]
    ResourceLimit { estimate: f64, cutoff: f64, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(msg: impl Into<String>) -> LabError {
    LabError::InvalidArgument(msg.into())
}
