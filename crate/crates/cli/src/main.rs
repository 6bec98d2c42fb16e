//! `twophoton`: configuration-driven front end for the scattering library.
//!
//! ```text
//! twophoton simulate  [--config run.toml] [--out DIR] [--linear-only] [--check] [--key value ...]
//! twophoton g2        ...
//! twophoton oracle    ...
//! twophoton decompose ...
//! twophoton compare A.csv B.csv [--check] [--compare.tol 1e-10]
//! ```
//!
//! Any configuration key may be overridden on the command line as
//! `--pulse.length 40` or `--pulse.length=40`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 `--check` failure, 4 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Check(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<twophoton::Error> for CliError {
    fn from(e: twophoton::Error) -> Self {
        match e {
            twophoton::Error::Io(m) => CliError::Io(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "twophoton", version, about = "Two-photon scattering off a two-level atom in a chiral waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file with flat dotted keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Drop the nonlinear term.
    #[arg(long, global = true)]
    linear_only: bool,
    /// Verify the result against its reference and exit with 3 on failure.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scatter the configured pulse and write the output, linear and nonlinear grids.
    Simulate,
    /// Second-order correlation slice at the anchor, with dip zeros.
    G2,
    /// Lab-frame time stepping compared with the scattering map.
    Oracle,
    /// Output split into the three interaction processes.
    Decompose,
    /// Compare two CSV files of the same kind.
    Compare { a: PathBuf, b: PathBuf },
}

fn run() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().collect();
    let (rest, overrides) = config::extract_overrides(argv)?;
    let cli = match Cli::try_parse_from(rest) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let mut cfg = config::load(cli.config.as_deref(), &overrides)?;
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    let ctx = commands::Ctx::new(cfg, cli.linear_only, cli.check)?;
    match cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::G2 => commands::g2(&ctx),
        Command::Oracle => commands::oracle(&ctx),
        Command::Decompose => commands::decompose(&ctx),
        Command::Compare { a, b } => commands::compare(&ctx, &a, &b),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
