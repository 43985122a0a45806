use std::path::PathBuf;

use thiserror::Error;

/// CLI failures, each mapped to a documented exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Params(String),

    #[error("verification failed: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Read { .. } | CliError::Write { .. } => 2,
            CliError::Parse { .. } => 3,
            CliError::Params(_) => 4,
        }
    }
}

impl From<mprofile::Error> for CliError {
    fn from(e: mprofile::Error) -> Self {
        CliError::Params(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
