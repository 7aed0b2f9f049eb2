//! Library surface of the verification tool: report shapes, dataset
//! ingestion, check suites, germ-space prediction, and CSV dumps.
//!
//! Every command funnels errors through [`CliError`], which splits
//! invocation mistakes (bad flags, unreadable paths: exit 2) from data
//! and identity failures found during a well-formed run (exit 1).

use std::fmt;

pub mod dump;
pub mod ingest;
pub mod predict;
pub mod report;
pub mod suites;

/// Command-level failure, tagged with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// The invocation itself is unusable: exit code 2.
    Config(String),
    /// The run was well-formed but the data or an identity failed: exit 1.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<padic_forms::CoreError> for CliError {
    fn from(e: padic_forms::CoreError) -> Self {
        CliError::Data(e.to_string())
    }
}
