use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

mod config;
mod converge;
mod density;
mod output;
mod simulate;
mod verify;

use config::UsageError;

#[derive(Parser, Debug)]
#[command(
    name = "wojcik",
    version,
    about = "One-defect Hadamard walk: simulation and weak-limit analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the walk and write the rescaled distribution next to the limit density.
    Simulate(CommonArgs),
    /// Tabulate w(x), f_K(x) and their product on a uniform grid.
    Density(CommonArgs),
    /// Run the consistency checks for one configuration.
    Verify(CommonArgs),
    /// Compare binned empirical masses with the limit over a ladder of times.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Defect phase, in units of 2 pi.
    #[arg(long, default_value_t = 0.5)]
    pub phi: f64,
    /// Initial coin state a,phi1,b,phi2 for [a e^{i phi1}, b e^{i phi2}].
    #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
    pub init: String,
    /// Number of steps (simulate: 100, verify: 12, converge: 10000).
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Absolute tolerance for the density integrals.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Width of the scoring bins in x/t.
    #[arg(long, default_value_t = wojcik::convergence::DEFAULT_BIN_WIDTH)]
    pub bin_width: f64,
}

/// Checks ran but at least one failed.
#[derive(Debug)]
pub struct ChecksFailed(pub usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate::run(&args),
        Command::Density(args) => density::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Converge(args) => converge::run(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            eprintln!("run `wojcik --help` for usage");
            ExitCode::from(2)
        }
        Err(e) if e.is::<ChecksFailed>() => {
            eprintln!("verification failed: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
