use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] stockopt_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// One or more self-checks failed; details are already on stdout.
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed => 1,
            _ => 2,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
