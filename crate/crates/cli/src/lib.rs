//! Experiment harness: configuration ingestion, dispatch into the library,
//! and persistence of deterministic reports.

pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

/// Harness-level error with the process exit code it maps to.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Budget(_) => 3,
            HarnessError::Io(_) => 4,
            HarnessError::Internal(_) => 4,
        }
    }
}

impl From<quadrics_core::Error> for HarnessError {
    fn from(e: quadrics_core::Error) -> Self {
        use quadrics_core::Error as E;
        match e {
            E::CapExceeded { .. } | E::BoxTooLarge { .. } | E::NotStabilized { .. } => {
                HarnessError::Budget(e.to_string())
            }
            E::InvalidInput(_)
            | E::AsymmetricGram
            | E::DegenerateForm
            | E::NotSquarefree(_)
            | E::MissingPrime(_)
            | E::BadPrime(_) => HarnessError::Config(e.to_string()),
            other => HarnessError::Internal(other.to_string()),
        }
    }
}

pub type HResult<T> = std::result::Result<T, HarnessError>;
