//! Library half of the `hamming` command: argument types, single-point
//! evaluation, sweeps, oracle certification and scaling fits.

pub mod args;
pub mod certify;
pub mod compute;
pub mod eval;
pub mod fit;
pub mod sweep;

use std::fmt;

use hamming_entanglement::Error;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Failure = 1,
    Usage = 2,
}

/// Error reported by a subcommand, carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError { exit: Exit::Usage, message: message.into() }
    }

    pub fn failure(message: impl Into<String>) -> CliError {
        CliError { exit: Exit::Failure, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Internal(_) => CliError::failure(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::usage(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
