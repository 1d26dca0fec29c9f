//! Configuration-driven front end for `magtorus-core`.

pub mod commands;
pub mod config;
pub mod expr;
pub mod report;

use std::path::PathBuf;
use thiserror::Error;

pub use config::RunConfig;
pub use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] magtorus_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use magtorus_core::Error as E;
        match self {
            CliError::Core(E::NonConvergence(_)) => exit::NON_CONVERGENCE,
            CliError::Core(E::NumericalMismatch(_)) => exit::CHECK_FAILED,
            _ => exit::INVALID_INPUT,
        }
    }
}

pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    NormalForm,
    Verify,
    Spectrum,
    Group,
    BundleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::NormalForm => "normal-form",
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::Group => "group",
            Command::BundleCheck => "bundle-check",
        }
    }
}

#[derive(Debug, clap::Parser)]
#[command(name = "magtorus", version, about = "Magnetic translations and Landau spectra on flat tori")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Band-sweep CSV destination (spectrum only).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Exit with code 3 when a refinement check does not converge.
    #[arg(long)]
    pub strict: bool,
}

/// What a command produced.
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

pub fn execute(command: Command, config_text: &str) -> Result<Outcome, CliError> {
    let (cfg, echo) = RunConfig::parse(config_text)?;
    let mut report = Report::new(command.name(), echo);
    let csv = match command {
        Command::NormalForm => commands::normal_form(&cfg, &mut report).map(|_| None),
        Command::Verify => commands::verify(&cfg, &mut report).map(|_| None),
        Command::Spectrum => commands::spectrum(&cfg, &mut report).map(Some),
        Command::Group => commands::group(&cfg, &mut report).map(|_| None),
        Command::BundleCheck => commands::bundle_check(&cfg, &mut report).map(|_| None),
    }?;
    Ok(Outcome { report, csv })
}

pub fn exit_code(outcome: &Outcome, strict: bool) -> i32 {
    if strict && outcome.report.warnings > 0 {
        exit::NON_CONVERGENCE
    } else if outcome.report.pass() {
        exit::PASS
    } else {
        exit::CHECK_FAILED
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let result = std::fs::read_to_string(&args.config)
        .map_err(CliError::from)
        .and_then(|text| execute(args.command, &text));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("magtorus {}: {e}", args.command.name());
            return e.exit_code();
        }
    };
    let json = outcome.report.to_json();
    let written = match &args.out {
        Some(path) => std::fs::write(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    };
    let written = written.and_then(|_| match (&args.csv, &outcome.csv) {
        (Some(path), Some(csv)) => std::fs::write(path, csv),
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("magtorus: cannot write output: {e}");
        return exit::INVALID_INPUT;
    }
    exit_code(&outcome, args.strict)
}
