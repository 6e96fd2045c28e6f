use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] adiasearch::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {source}")]
    ConfigFile {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("oracle check failed: max |dP_m| = {max_delta:e} (tolerance {tolerance:e}), {errors} run(s) lost unitarity")]
    CheckFailed {
        max_delta: f64,
        tolerance: f64,
        errors: usize,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad input, 3 for a failed check, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use adiasearch::Error as E;
        match self {
            CliError::Config(_) | CliError::ConfigFile { .. } => 2,
            CliError::Core(
                E::InvalidInstance { .. }
                | E::InvalidParameter { .. }
                | E::OracleSizeExceeded { .. }
                | E::ExactDegenerateN,
            ) => 2,
            CliError::CheckFailed { .. } => 3,
            _ => 1,
        }
    }
}
