use thiserror::Error;
use twistlab_core::TwistError;

use crate::verify::SuiteReport;

/// Failures of a harness run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("input rejected: {0}")]
    Rejected(#[from] TwistError),
    #[error("verification failed in suite {}", .0.suite)]
    Verification(Box<SuiteReport>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Verification(_) => 1,
            HarnessError::Config(_) | HarnessError::Rejected(_) => 2,
            HarnessError::Io(_) | HarnessError::Csv(_) | HarnessError::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
