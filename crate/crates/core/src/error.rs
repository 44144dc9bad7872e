use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{quantity} = {value} is outside the model domain ({constraint})")]
    Domain { quantity: &'static str, value: f64, constraint: &'static str },

    #[error("BRB {brb} belongs to the mmWave band; SINR is only defined for sub-6 GHz BRBs")]
    WrongBand { brb: usize },

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("inconsistent matching: {0}")]
    InconsistentMatching(String),

    #[error(
        "instance too large for exhaustive search: {brbs} BRBs and {demanding} D-BSs \
         (limit {max_brbs} BRBs, {max_demanding} D-BSs)"
    )]
    InstanceTooLarge { brbs: usize, demanding: usize, max_brbs: usize, max_demanding: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, err: &serde_json::Error) -> Self {
        Error::Parse { path: path.into(), line: err.line(), column: err.column(), message: err.to_string() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
