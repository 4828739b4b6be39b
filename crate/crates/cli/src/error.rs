//! Failures of a command and the process exit codes they map to.
//!
//! | code | meaning                                                        |
//! |------|----------------------------------------------------------------|
//! | 0    | success                                                        |
//! | 2    | unreadable or malformed input (files, config, flag values)     |
//! | 3    | a precondition of the requested construction does not hold     |
//! | 4    | a requested check ran and failed                               |
//! | 5    | a resource limit was hit, or an output could not be written    |

use std::path::PathBuf;

use delone_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("check failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::InvalidInput(_) => 2,
                CoreError::Precondition(_)
                | CoreError::RefinePitch { .. }
                | CoreError::InsufficientWindow { .. }
                | CoreError::EmptyRestriction { .. } => 3,
                CoreError::Resource(_) => 5,
            },
            CliError::Read { .. } | CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Assertion(_) => 4,
            CliError::Write { .. } => 5,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
