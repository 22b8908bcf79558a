use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// A self-check (e.g. `equiv-test`) exceeded its tolerance.
    pub const CHECK_FAILED: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const DIVERGED: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nfb_core::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("diverged under certified parameters: {0}")]
    Diverged(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(nfb_core::Error::Io(_)) => exit::IO,
            CliError::Core(nfb_core::Error::NonFinite { .. }) => exit::DIVERGED,
            CliError::Core(_) | CliError::Config(_) => exit::INFEASIBLE,
            CliError::Io { .. } => exit::IO,
            CliError::Diverged(_) => exit::DIVERGED,
            CliError::CheckFailed(_) => exit::CHECK_FAILED,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
