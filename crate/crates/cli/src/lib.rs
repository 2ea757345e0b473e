//! Command-line front end: argument parsing, input resolution, the analysis
//! commands and report rendering.

pub mod args;
mod commands;
mod input;
pub mod report;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::Cli;

/// Exit code for data and runtime failures.
pub const EXIT_RUNTIME: u8 = 1;
/// Exit code for usage and validation failures.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fmoment::Error> for CliError {
    fn from(e: fmoment::Error) -> Self {
        use fmoment::Error::*;
        match e {
            InvalidParameter(_) | Divisibility { .. } | InvalidOrder(_) | OrderExceeded { .. } | WindowTooLong { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn parse<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Runs the parsed command and returns the rendered report.
pub fn execute(cli: &Cli) -> CliResult<String> {
    commands::run(cli)
}
