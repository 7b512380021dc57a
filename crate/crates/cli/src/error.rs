use thiserror::Error;

/// Failures of a CLI command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or arguments (exit code 1).
    #[error("{0}")]
    Usage(String),
    /// The input data or the requested analysis is invalid (exit code 2).
    #[error(transparent)]
    Data(#[from] hcc_core::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
