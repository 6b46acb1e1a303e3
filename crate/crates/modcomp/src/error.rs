use std::io;

use thiserror::Error;

/// Exit status of a check that failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for usage, configuration and budget errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dump error: {0}")]
    Dump(String),
    #[error(transparent)]
    Core(#[from] modcomp_core::Error),
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    /// Parameter and budget problems are the caller's to fix; numerical
    /// failures count as failed checks.
    pub fn exit_code(&self) -> i32 {
        use modcomp_core::Error as E;
        match self {
            RunError::Config(_) | RunError::Dump(_) => EXIT_USAGE,
            RunError::Core(E::InvalidParameter { .. } | E::BudgetExceeded { .. } | E::InvalidGridSize(_) | E::NotPowerOfTwo(_)) => {
                EXIT_USAGE
            }
            RunError::Io(_) | RunError::Csv(_) | RunError::Json(_) => EXIT_USAGE,
            RunError::Core(_) => EXIT_CHECK_FAILED,
        }
    }
}
