use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures surfaced by the command layer, each mapped to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] jmfield_core::error::Error),
}

impl CliError {
    /// 1 for validation failures, 2 for I/O and parse errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Invalid(_) | CliError::Model(_) => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}
