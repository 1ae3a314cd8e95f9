use std::io;
use std::path::PathBuf;

use thiserror::Error;
use zrsim_core::ModelError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("cannot read config file {}: {source}", path.display())]
    ConfigRead { path: PathBuf, source: io::Error },

    #[error("invalid config file {}: {source}", path.display())]
    ConfigParse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error("cannot write output: {0}")]
    Stdout(io::Error),
}

impl CliError {
    /// 2 for bad input, 1 for I/O trouble.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::ConfigParse { .. } => 2,
            CliError::Model(e) if e.is_validation() => 2,
            CliError::Model(_) | CliError::ConfigRead { .. } | CliError::Write { .. } | CliError::Stdout(_) => 1,
        }
    }
}
