//! Command-line front end for the `tnum` binary.

pub mod commands;
pub mod config;
pub mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{RunConfig, TargetFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tnum_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Budget and configuration problems share exit code 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Frobenius,
    Bjn,
    Ajn,
    Telescope,
    Annihilator,
    Distance,
    Sandwich,
    Liouville,
    Applio,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    Wn,
    Wstar,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimateTarget {
    Exponent,
    Type,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients of ξ(r, m) up to --horizon.
    Coeffs,
    /// Run one family of exact checks.
    Verify { target: VerifyTarget },
    /// Height-shell scan for w_n or w_n*.
    Scan { kind: ScanArg },
    /// Finite-scale exponent windows or type bounds.
    Estimate { target: EstimateTarget },
    /// Roots of the spec's polynomial in F_q((T^{-1})).
    Roots,
}

#[derive(Debug, Parser)]
#[command(name = "tnum", version, about = "T-numbers in F_q((T^{-1})): constructions, checks and scans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub horizon: Option<u64>,
    #[arg(long, global = true)]
    pub hmax: Option<usize>,
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Cross-check against a direct-summation oracle.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Enumeration budget for scans.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true)]
    pub j: Option<usize>,
    #[arg(long, global = true)]
    pub count: Option<usize>,
}

/// A finished command: the rendered report and whether every check passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// Parses arguments and runs the command without touching stdout.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let path = cli.spec.as_ref().ok_or_else(|| CliError::Config("--spec FILE is required".into()))?;
    let cfg = RunConfig::load(path)?;
    commands::dispatch(cli, &cfg)
}

/// Full process behaviour: writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("tnum: {e}");
            return e.exit_code();
        }
    };
    for d in &outcome.diagnostics {
        eprintln!("tnum: {d}");
    }
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &outcome.body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.body.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("tnum: i/o error: {e}");
        return 2;
    }
    outcome.exit_code()
}
