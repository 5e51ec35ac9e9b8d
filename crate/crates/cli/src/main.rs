//! `reskit` command-line front end.
//!
//! Exit codes: 0 success, 1 failed self-check, 2 numeric or I/O failure,
//! 64 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod check;
mod commands;
mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use reskit::goldenrule::GoldenRuleError;
use reskit::io::IoError;
use reskit::DeltaShellError;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    CheckFailed,
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Numeric(format!("cannot write {}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Numeric(_) => 2,
            CliError::CheckFailed => 1,
        }
    }
}

impl From<DeltaShellError> for CliError {
    fn from(e: DeltaShellError) -> Self {
        match e {
            DeltaShellError::NonRepulsive { .. } => CliError::Usage(format!(
                "{e}; resonances are searched for the repulsive delta shell only"
            )),
            DeltaShellError::InvalidParams(_) | DeltaShellError::EmptySearch => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<GoldenRuleError> for CliError {
    fn from(e: GoldenRuleError) -> Self {
        match e {
            GoldenRuleError::DeltaShell(inner) => inner.into(),
            GoldenRuleError::InvalidGrid(_)
            | GoldenRuleError::InvalidQuantumNumbers { .. }
            | GoldenRuleError::MissingReducedElement { .. }
            | GoldenRuleError::NonPositiveEnergy { .. }
            | GoldenRuleError::EmptySuperposition
            | GoldenRuleError::DuplicatePole => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    match cli.command {
        Command::Poles(a) => commands::poles(a, command_line),
        Command::Spectrum(a) => commands::spectrum(a, command_line),
        Command::Gamma(a) => commands::gamma(a, command_line),
        Command::FermiCompare(a) => commands::fermi_compare(a, command_line),
        Command::Interfere(a) => commands::interfere(a, command_line),
        Command::Check(a) => check::run(a, command_line),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Numeric(m) => eprintln!("error: {m}"),
                CliError::CheckFailed => eprintln!("error: one or more checks failed"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
