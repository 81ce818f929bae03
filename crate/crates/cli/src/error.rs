use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Library(#[from] ot_wiretap::Error),

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },

    #[error("verification failed: {0}")]
    Verification(String),
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use ot_wiretap::Error as E;
        let code = match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Library(E::TooLarge { .. } | E::BudgetExceeded(_)) => EXIT_RESOURCE,
            CliError::Library(E::NonConvergence { .. } | E::InvariantViolated(_)) => EXIT_FAILURE,
            CliError::Library(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Verification(_) => EXIT_FAILURE,
        };
        ExitCode::from(code)
    }
}
