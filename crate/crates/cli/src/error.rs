use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ASSUMPTION: i32 = 3;
pub const EXIT_MAX_ITER: i32 = 4;
pub const EXIT_TOO_LARGE: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] avi_core::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        CliError::Parse { path: path.into(), msg: msg.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        use avi_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => EXIT_PARSE,
            CliError::Solver(E::NotPositiveDefinite { .. } | E::AssumptionViolated(_)) => EXIT_ASSUMPTION,
            CliError::Solver(E::TooLarge { .. }) => EXIT_TOO_LARGE,
            CliError::Solver(E::DimensionMismatch { .. } | E::InvalidInput(_)) => EXIT_PARSE,
            _ => EXIT_OTHER,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
