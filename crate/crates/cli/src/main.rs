//! `faso` command-line frontend.

mod build;
mod generate;
mod homology;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faso::homology::Coefficients;
use faso::metric::ModelSpace;

pub use output::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "faso", version, about = "Build and check finite approximative sequences of compact metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write per-level sample CSVs and a schedule for an example space.
    Generate(generate::GenerateArgs),
    /// Build a tower from a schedule: dump, DOT diagrams, validation report.
    Build(build::BuildArgs),
    /// Betti table, induced maps and limit ranks of a built tower.
    Homology(homology::HomologyArgs),
    /// Projection diagrams, threads and tower comparisons on a built tower.
    Verify(verify::VerifyArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Shared {
    /// JSON config file (schedule for `build`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Relative tolerance η of ball and diameter comparisons.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Largest simplex dimension kept in the terms.
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Highest homology degree.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Use only levels 1..=N.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Accept schedules that only satisfy ε_{n+1} < ε_n / 2.
    #[arg(long)]
    pub relaxed: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficients: q, z or p:PRIME.
    #[arg(long, default_value = "q", value_parser = parse_field)]
    pub field: Coefficients,
    /// Run every stage on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl Shared {
    pub fn exec(&self) -> faso::Exec {
        if self.sequential {
            faso::Exec::Sequential
        } else {
            faso::Exec::Parallel
        }
    }
}

fn parse_field(s: &str) -> Result<Coefficients, String> {
    s.parse().map_err(|e: faso::Error| e.to_string())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Space {
    Circle,
    Cantor,
    TwoSquares,
    Interval,
}

impl From<Space> for ModelSpace {
    fn from(s: Space) -> ModelSpace {
        match s {
            Space::Circle => ModelSpace::Circle,
            Space::Cantor => ModelSpace::Cantor,
            Space::TwoSquares => ModelSpace::TwoSquares,
            Space::Interval => ModelSpace::Interval,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Build(a) => build::run(a),
        Command::Homology(a) => homology::run(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
