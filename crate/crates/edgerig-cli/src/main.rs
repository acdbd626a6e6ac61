//! `edgerig`: moments, rigidity experiments, kernel identities, model-problem
//! checks and matrix samples from the command line.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 accuracy failure, 3 I/O failure.

mod commands;
mod config;
mod output;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Flags, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("accuracy: {0}")]
    Accuracy(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Accuracy(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<edgerig::Error> for CliError {
    fn from(e: edgerig::Error) -> Self {
        match e {
            edgerig::Error::Domain(m) | edgerig::Error::Config(m) => CliError::Config(m),
            edgerig::Error::Accuracy(m) | edgerig::Error::Numerical(m) => CliError::Accuracy(m),
        }
    }
}

#[derive(Parser)]
#[command(name = "edgerig", version, about = "Edge point processes of random matrix theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponential moments as Fredholm determinants against their asymptotics
    Moments(Flags),
    /// Global rigidity statistics on sampled matrices
    Rigidity(Flags),
    /// Kernel values on a grid, or a kernel identity check
    Kernel(Flags),
    /// Residuals of the parabolic-cylinder model problem
    PcVerify(Flags),
    /// Rescaled extreme eigenvalues of one random matrix
    Sample(Flags),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Moments(f) => commands::moments(&Settings::new(f)?),
        Command::Rigidity(f) => commands::rigidity(&Settings::new(f)?),
        Command::Kernel(f) => commands::kernel(&Settings::new(f)?),
        Command::PcVerify(f) => commands::pc_verify(&Settings::new(f)?),
        Command::Sample(f) => commands::sample(&Settings::new(f)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let quiet = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            return ExitCode::from(if quiet { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgerig: {e}");
            ExitCode::from(e.code())
        }
    }
}
