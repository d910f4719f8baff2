// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

/// Failure classes, each with its own process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A self-check found a result outside its tolerance.
    #[error("check failed: {0}")]
    CheckFailed(String),

    /// Malformed or inconsistent configuration.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// The run exceeded its memory cap.
    #[error("resource limit: {0}")]
    ResourceCap(String),

    /// Reading the config or writing the output failed.
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::CheckFailed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::ResourceCap(_) => 3,
            CliError::Io(_) => 4,
        })
    }
}

impl From<symprop::Error> for CliError {
    fn from(e: symprop::Error) -> Self {
        match e {
            symprop::Error::TermCap { .. } => CliError::ResourceCap(format!("memory_cap: {e}")),
            other => CliError::Validation(other.to_string()),
        }
    }
}
