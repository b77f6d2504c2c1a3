//! `qmc`: low-discrepancy point generation, discrepancies, t-values, CBC
//! search and quasi-Monte Carlo cubature from the command line.
//!
//! Every command prints a `#` line with its canonical arguments first; running
//! `qmc` with those arguments reproduces the output byte for byte.
//! Exit codes: 0 on success, 2 for bad configuration, 3 for numerical failure.

mod commands;
mod format;
mod seq;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmc_core::QmcError;

#[derive(Debug, Parser)]
#[command(
    name = "qmc",
    version,
    about = "Low-discrepancy sequences, discrepancies and quasi-Monte Carlo cubature"
)]
struct Cli {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print points as CSV.
    Generate(commands::GenerateArgs),
    /// Discrepancy of the first n points.
    Discrepancy(commands::DiscrepancyArgs),
    /// t-value of a base-2 digital net.
    Tvalue(commands::TvalueArgs),
    /// Component-by-component lattice search.
    Cbc(commands::CbcArgs),
    /// Adaptive cubature with a CLT stopping rule.
    Integrate(commands::IntegrateArgs),
    /// Multilevel estimate on a built-in level stack.
    MlIntegrate(commands::MlArgs),
    #[command(subcommand)]
    Benchmark(Benchmark),
}

#[derive(Debug, Subcommand)]
enum Benchmark {
    /// Keister errors for grid, IID and low-discrepancy rules over n = 2^m.
    Keister(commands::BenchKeisterArgs),
    /// Discrepancy of one sequence against the IID root mean square over n = 2^m.
    Discrepancy(commands::BenchDiscrepancyArgs),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl From<QmcError> for CliError {
    fn from(e: QmcError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Discrepancy(a) => commands::discrepancy(a),
        Command::Tvalue(a) => commands::tvalue(a),
        Command::Cbc(a) => commands::cbc(a),
        Command::Integrate(a) => commands::integrate(a),
        Command::MlIntegrate(a) => commands::ml_integrate(a),
        Command::Benchmark(Benchmark::Keister(a)) => commands::bench_keister(a),
        Command::Benchmark(Benchmark::Discrepancy(a)) => commands::bench_discrepancy(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let text = match run(&cli) {
        Ok(t) => t,
        Err(CliError::Config(m)) => {
            eprintln!("qmc: {m}");
            return ExitCode::from(2);
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("qmc: numerical failure: {m}");
            return ExitCode::from(3);
        }
    };
    let written = match &cli.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(m) => {
            eprintln!("qmc: {m}");
            ExitCode::from(2)
        }
    }
}
