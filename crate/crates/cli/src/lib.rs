//! The `mkseries` command line: argument types, report records and command
//! implementations. The binary only parses, dispatches and exits.

pub mod args;
mod commands;
pub mod records;

use std::fmt;

use markov_core::catalog::CatalogError;
use markov_core::exact::ExactError;
use markov_core::hgterm::TermError;
use markov_core::markov::MarkovError;

pub use commands::run;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    VerifyFailed = 1,
    Shortfall = 2,
    Disagreement = 3,
    Usage = 64,
    Singular = 65,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A finished command: report body for stdout, its exit status, and
/// diagnostics for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub status: ExitStatus,
    pub notes: Vec<String>,
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { status: ExitStatus::Usage, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn exact_status(e: &ExactError) -> ExitStatus {
    match e {
        ExactError::DivisionByZero => ExitStatus::Singular,
        _ => ExitStatus::Usage,
    }
}

fn term_status(e: &TermError) -> ExitStatus {
    match e {
        TermError::VanishingDenominator { .. } | TermError::ZeroTerm { .. } => ExitStatus::Singular,
        TermError::Exact(e) => exact_status(e),
        _ => ExitStatus::Usage,
    }
}

fn markov_status(e: &MarkovError) -> ExitStatus {
    match e {
        MarkovError::InvalidParameters(_) | MarkovError::BeyondCap { .. } => ExitStatus::Usage,
        MarkovError::Underdetermined(_) | MarkovError::DoesNotClose(_) => ExitStatus::VerifyFailed,
        MarkovError::Undefined { .. } | MarkovError::Vanishing(_) | MarkovError::SingularCertificate(_) => {
            ExitStatus::Singular
        }
        MarkovError::Term(e) => term_status(e),
        MarkovError::Exact(e) => exact_status(e),
    }
}

impl From<MarkovError> for CliError {
    fn from(e: MarkovError) -> Self {
        CliError { status: markov_status(&e), message: e.to_string() }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        let status = match &e {
            CatalogError::UnknownEntry(_) | CatalogError::InvalidParameters(_) => ExitStatus::Usage,
            CatalogError::NoGeometricBound(_) | CatalogError::Shortfall { .. } => ExitStatus::Shortfall,
            CatalogError::Registration(_) => ExitStatus::VerifyFailed,
            CatalogError::Term(e) => term_status(e),
            CatalogError::Markov(e) => markov_status(e),
            CatalogError::Exact(e) => exact_status(e),
        };
        CliError { status, message: e.to_string() }
    }
}
