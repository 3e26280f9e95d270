use std::path::PathBuf;

use thiserror::Error;

/// Everything the CLI and service can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] counterbound::Error),

    #[error("InvalidJson: {0}")]
    Json(#[from] serde_json::Error),

    #[error("InvalidArgument: {0}")]
    Usage(String),

    #[error("Io: {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("Io: writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Machine-readable code, identical on the command line and over HTTP.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Json(_) => "InvalidJson",
            CliError::Usage(_) => "InvalidArgument",
            CliError::Io { .. } | CliError::Csv(_) => "Io",
        }
    }

    /// 3 for zero-mass conditioning events, 2 for every other input
    /// problem, 1 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_degenerate() => 3,
            CliError::Core(_) | CliError::Json(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } => 2,
            CliError::Csv(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
