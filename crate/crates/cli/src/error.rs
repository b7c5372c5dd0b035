use thiserror::Error;

/// Failures of a subcommand, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, names or input files. Exit status 2.
    #[error("{0}")]
    Usage(String),
    /// Anything that failed while executing. Exit status 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<moead_core::Error> for CliError {
    fn from(e: moead_core::Error) -> Self {
        use moead_core::Error as E;
        match e {
            E::Io(io) => CliError::Runtime(io.to_string()),
            E::LengthMismatch { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}
