mod args;
mod commands;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or input file (exit 2).
    Config(String),
    /// No codebook exists for the parameters (exit 3).
    Infeasible(String),
    /// Certification failed (exit 4).
    VerifyFailed(String),
    /// Could not read or write a file (exit 1).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::VerifyFailed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error: invalid-config: {m}"),
            CliError::Infeasible(m) => write!(f, "error: infeasible: {m}"),
            CliError::VerifyFailed(m) => write!(f, "error: verify-failed: {m}"),
            CliError::Io(m) => write!(f, "error: io: {m}"),
        }
    }
}

impl From<beamsquint::Error> for CliError {
    fn from(e: beamsquint::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::Config(first.to_string()));
            return ExitCode::from(2);
        }
    };

    let result = match cli.command {
        Command::Pattern(a) => commands::pattern(a),
        Command::Design(a) => commands::design(a),
        Command::Verify(a) => commands::verify(a),
        Command::SweepB(a) => commands::sweep_b(a),
        Command::SweepN(a) => commands::sweep_n(a),
        Command::Bounds(a) => commands::bounds(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
