//! Command failures and their exit codes.

use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid configuration, arguments or input data (exit 2).
    Input(String),
    /// Reading or writing files failed (exit 3).
    Io(String),
    /// A numerical routine failed on otherwise valid input (exit 1).
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<homsim_core::Error> for CliError {
    fn from(e: homsim_core::Error) -> Self {
        match e {
            homsim_core::Error::Domain(_) | homsim_core::Error::Config(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
