//! Library side of the `randmatch` binary: argument parsing, command
//! dispatch and report encoding, callable in-process through [`run_cli`].

mod args;
mod commands;
mod record;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use record::{to_csv, ExperimentRecord, GraphFingerprint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] randmatch::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use randmatch::Error as E;
        match self {
            CliError::Core(E::Capacity { .. } | E::Timeout { .. }) => EXIT_CAPACITY,
            CliError::Core(E::Invariant(_)) | CliError::Csv(_) => EXIT_INVARIANT,
            CliError::Core(E::Param(_) | E::Parse { .. }) | CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
        }
    }
}

/// Parses `argv` (program name first), runs the command, writes the report
/// to `out` (or the `-o` path) and diagnostics to `err`. Returns the exit
/// code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::execute(&cli, echo, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
