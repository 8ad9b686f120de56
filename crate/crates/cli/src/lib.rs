//! Scenario runner and verification harness for the relative-kinematics
//! pipeline: parses TOML scenarios, sweeps the observer parameter, emits
//! CSV or tables, and checks the pipeline against closed-form references
//! and the transport axioms.

pub mod run;
pub mod scenario;
pub mod verify;

/// Errors surfaced to the command line. Validation problems exit with
/// status 1; verification failures are not errors (the report carries
/// them) and exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Pipeline(#[from] relkin::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
