//! Command-line harness: JSON operator documents in, verification reports out.

mod cli;
pub mod document;
pub mod report;
pub mod suite;

use thiserror::Error;

use crate::error::KreinError;

pub use cli::run;
pub use document::OperatorDocument;
pub use report::{ReportEntry, Summary, VerificationReport, REPORT_VERSION};
pub use suite::{run_suite, trial_checks, SuiteConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Krein(#[from] KreinError),

    #[error("one or more checks failed")]
    Checks,
}

/// Process exit code for an outcome.
///
/// 0 success, 1 malformed input, 2 violated precondition, 3 numerical
/// refusal, 4 failed check.
pub fn exit_code(outcome: &Result<(), HarnessError>) -> i32 {
    match outcome {
        Ok(()) => 0,
        Err(HarnessError::Input(_) | HarnessError::Io(_)) => 1,
        Err(HarnessError::Checks) => 4,
        Err(HarnessError::Krein(e)) if e.is_precondition() => 2,
        Err(HarnessError::Krein(e)) if e.is_numerical_refusal() || *e == KreinError::Singular => 3,
        Err(HarnessError::Krein(_)) => 1,
    }
}
