use std::path::Path;

use quatkmp::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }

    /// 0 ok, 2 configuration or input, 3 numerical, 4 violated assumption.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Core(e) => match e {
                Error::Fit(_) | Error::Solve(_) | Error::Condition(_) => 3,
                Error::Domain(_) | Error::Alignment(_) => 4,
                Error::Layout(_) | Error::Dim(_) | Error::Length(_) | Error::InvalidInput(_) => 2,
            },
        }
    }
}
