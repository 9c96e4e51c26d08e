use std::path::PathBuf;

use anchorframe_core::ClientError;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

/// Failures surfaced by the command-line tools, each tied to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] anchorframe_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        AppError::Json { path: path.into(), source }
    }

    /// 0 success, 2 usage or input, 3 no target found, 4 service failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(anchorframe_core::Error::NoTargetFound(_)) => 3,
            AppError::Core(anchorframe_core::Error::Client(_)) => 4,
            _ => 2,
        }
    }
}

impl From<ClientError> for AppError {
    fn from(e: ClientError) -> Self {
        AppError::Core(e.into())
    }
}
