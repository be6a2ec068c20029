use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: line {line}: {msg}")]
    Data { path: PathBuf, line: u64, msg: String },

    #[error("{0}")]
    Numeric(rabi_core::Error),

    #[error("no feasible ς up to {varsigma}: max violation {max_violation:.3e}")]
    Infeasible { varsigma: f64, max_violation: f64 },

    #[error("verification failed at {0}")]
    Verify(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Data { .. } | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Infeasible { .. } => EXIT_INFEASIBLE,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<rabi_core::Error> for CliError {
    fn from(e: rabi_core::Error) -> Self {
        use rabi_core::Error as E;
        match e {
            E::Domain(msg) | E::Config(msg) => CliError::Config(msg),
            E::Infeasible { varsigma, max_violation } => CliError::Infeasible { varsigma, max_violation },
            other => CliError::Numeric(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
