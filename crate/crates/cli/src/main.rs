//! `flamespeed`: solves, sweeps and checks flame-speed cell problems from a TOML config.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Overrides, RunConfig};

/// Exit codes.
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_SOLVER: u8 = 2;
pub const EXIT_SELECTION: u8 = 3;
pub const EXIT_COUNTEREXAMPLE: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<flamespeed_core::Error> for Failure {
    fn from(e: flamespeed_core::Error) -> Failure {
        use flamespeed_core::Error as E;
        let code = match &e {
            E::InvalidInput(_) | E::DegenerateDirection | E::Constraint(_) | E::Parse { .. } | E::Io(_) => EXIT_CONFIG,
            E::DegenerateMaximum { .. } | E::InfiniteMaxima | E::SelectionIllPosed(_) => EXIT_SELECTION,
            _ => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "flamespeed", version, about = "Flame speeds of the curvature G-equation in periodic shear flows")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "FLAMESPEED_OUT")]
    out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fixed grid size (power of two).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Newton tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one cell problem; writes solve.json and solve.csv.
    Solve,
    /// Markstein sweep with the monotonicity verdict; writes sweep.json and sweep.csv.
    Sweep,
    /// Selected inviscid profile, convergence study and slope diagnostic.
    Select,
    /// Randomized inequality suite; exit 4 on any counterexample.
    #[command(name = "verify-inequalities", alias = "verify")]
    Verify,
    /// Small-amplitude expansion, with an optional shear cross-check.
    Perturb,
    /// Viscous Hamilton-Jacobi cell problem over a d schedule.
    Hj,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let overrides = Overrides {
        out: cli.out,
        seed: cli.seed,
        grid: cli.grid,
        tol: cli.tol,
    };
    let cfg = RunConfig::load(cli.config.as_deref())?.finish(&overrides)?;
    let (files, summary) = match cli.command {
        Command::Solve => commands::solve(&cfg)?,
        Command::Sweep => commands::sweep(&cfg)?,
        Command::Select => commands::select(&cfg)?,
        Command::Verify => commands::verify(&cfg)?,
        Command::Perturb => commands::perturb(&cfg)?,
        Command::Hj => commands::hj(&cfg)?,
    };
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    output::write_all(&dir, &files)?;
    println!("{}", summary.message);
    match summary.failed {
        Some(code) => Err(Failure {
            code,
            message: summary.failure_note,
        }),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
