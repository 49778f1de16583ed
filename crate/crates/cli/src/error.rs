use riesz_lab::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Lab(#[from] LabError),

    #[error(transparent)]
    Usage(#[from] clap::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 2 for invalid input, 3 for numerical failures,
    /// 4 for an exceeded spectrum budget, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Usage(_) => 2,
            CliError::Lab(e) => match e {
                LabError::NumericalFailure(_) => 3,
                LabError::ResourceLimit { .. } => 4,
                LabError::InvalidArgument(_) | LabError::Parse { .. } | LabError::Precondition(_) => 2,
            },
            CliError::Io { .. } => 1,
        }
    }
}
