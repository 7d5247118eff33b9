use std::path::PathBuf;

use thiserror::Error;

/// Top-level CLI error; the variant determines the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Spec-file or argument validation problem (exit code 2).
    #[error("spec error: {0}")]
    Spec(String),
    /// Error propagated from the core library.
    #[error(transparent)]
    Core(#[from] ris_core::Error),
    /// Filesystem problem (exit code 3).
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 = spec/validation error, 3 = i/o error, 4 = unsupported operation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Core(ris_core::Error::Unsupported(_)) => 4,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
