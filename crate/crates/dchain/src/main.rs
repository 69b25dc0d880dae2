//! `dchain`: build, diagonalise, simulate and check descent-operator chains from the shell.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, Opts, RunConfig};

#[derive(Parser)]
#[command(name = "dchain", version, about = "Exact Markov chains from descent operators on combinatorial Hopf algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    /// Exact transition matrix
    Matrix,
    /// Eigenvalues with multiplicities
    Spectrum,
    /// Stationary distributions built from degree-one pieces
    Stationary,
    /// Explicit right eigenfunctions (tree and to-do chains)
    Eigenbasis,
    /// Seeded trajectories, state counts and an optional observable
    Simulate,
    /// Quotient chain: last k letters of the to-do list, or forests to trees
    Lump,
    /// Absorption probabilities by matrix powers and, where defined, by quasisymmetric functions
    Absorb,
    /// Run the invariant suites
    Verify,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or a failed validation; exit code 2.
    Config(String),
}

impl From<hopf_chains::error::Error> for CliError {
    fn from(e: hopf_chains::error::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn write_out(run: &RunConfig, text: &str) -> Result<(), CliError> {
    match &run.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn run(cmd: Cmd, opts: &Opts) -> Result<ExitCode, CliError> {
    let run = RunConfig::resolve(opts)?;
    let out = match cmd {
        Cmd::Matrix => commands::matrix(&run),
        Cmd::Spectrum => commands::spectrum_cmd(&run),
        Cmd::Stationary => commands::stationary(&run),
        Cmd::Eigenbasis => commands::eigenbasis(&run),
        Cmd::Simulate => commands::simulate(&run),
        Cmd::Lump => commands::lump(&run),
        Cmd::Absorb => commands::absorb(&run),
        Cmd::Verify => commands::verify(&run),
    }?;
    let format = run.format.unwrap_or(if cmd == Cmd::Verify { Format::Table } else { Format::Json });
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("values serialise") + "\n",
        Format::Csv => out.csv,
        Format::Table => out.table.ok_or_else(|| CliError::Config("--format table is only for verify".into()))?,
    };
    write_out(&run, &text)?;
    match out.failure {
        Some(f) => {
            eprintln!("counterexample: {f}");
            Ok(ExitCode::from(1))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd, &cli.opts) {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
