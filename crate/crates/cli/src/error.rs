use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] optomech_core::Error),

    /// A computation finished but the operating point is not stable.
    #[error("unstable regime: {0}")]
    Unstable(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to encode output: {0}")]
    Encode(String),
}

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const UNSTABLE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
    pub const IO: i32 = 5;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Unstable(_) => exit::UNSTABLE,
            CliError::Io { .. } => exit::IO,
            CliError::Encode(_) => exit::NUMERICAL,
            CliError::Core(e) if e.is_invalid_input() => exit::CONFIG,
            CliError::Core(e) if e.is_unstable_regime() => exit::UNSTABLE,
            CliError::Core(_) => exit::NUMERICAL,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
