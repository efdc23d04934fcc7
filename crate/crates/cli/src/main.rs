//! Command-line front end: synthesis, optimization, timelines and sweeps.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edgelayout::{CostError, FormatError, ModelError, OptimizeError, OracleError, ScenarioError, TimelineError};

#[derive(Parser, Debug)]
#[command(name = "edgelayout", version, about = "Place GNN input graphs onto edge servers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance (and optionally a churn trace) from a JSON config.
    Synth(SynthArgs),
    /// Compute a layout for an instance.
    Optimize(OptimizeArgs),
    /// Replay an evolution trace under one update policy.
    Evolve(EvolveArgs),
    /// Run one optimizer setting per value of R or theta.
    Sweep(SweepArgs),
    /// Check an instance and, optionally, a layout and a trace against it.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// JSON config with an `instance` section and an optional `churn` section.
    #[arg(long)]
    pub config: PathBuf,
    /// Output instance file.
    #[arg(long)]
    pub out: PathBuf,
    /// Output trace file; requires a `churn` section.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Overrides the config's top-level seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    GladS,
    Greedy,
    Random,
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    Random,
    UploadFirst,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOrder {
    Lowest,
    Seeded,
}

/// Optimizer flags shared by several subcommands.
#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Consecutive rejected cuts before stopping: a positive integer or `exhaustive`.
    #[arg(long = "R", default_value = "3")]
    pub rounds: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Init::Random)]
    pub init: Init,
    /// Start from this layout file instead of `--init`.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PairOrder::Lowest)]
    pub pair_order: PairOrder,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::GladS)]
    pub algo: Algo,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output layout file.
    #[arg(long)]
    pub out: PathBuf,
    /// Cost report CSV (one row).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Per-iteration CSV (glad-s only).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// DIMACS dump of the first auxiliary network (glad-s only).
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    /// State guard for the exhaustive oracle.
    #[arg(long, default_value_t = edgelayout::baseline::DEFAULT_MAX_STATES)]
    pub max_states: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyArg {
    NoAdjustment,
    Greedy,
    Incremental,
    Adaptive,
    Global,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, value_enum)]
    pub policy: PolicyArg,
    /// Drift threshold for `adaptive`.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Slot-0 layout; computed with glad-s when omitted.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Timeline CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    #[value(name = "R")]
    R,
    Theta,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values; R accepts `exhaustive`, theta accepts `inf`.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    /// Trace file, required for a theta sweep.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

/// Maps an error chain to the documented exit codes.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(OracleError::TooLarge { .. }) = cause.downcast_ref::<OracleError>() {
            return 4;
        }
        if cause.downcast_ref::<CostError>().is_some() {
            return 3;
        }
        match cause.downcast_ref::<OptimizeError>() {
            Some(OptimizeError::Cost(_)) => return 3,
            Some(_) => return 2,
            None => {}
        }
        match cause.downcast_ref::<TimelineError>() {
            Some(TimelineError::Optimize {
                source: OptimizeError::Cost(_),
                ..
            }) => return 3,
            Some(_) => return 2,
            None => {}
        }
        if cause.downcast_ref::<FormatError>().is_some()
            || cause.downcast_ref::<ModelError>().is_some()
            || cause.downcast_ref::<ScenarioError>().is_some()
            || cause.downcast_ref::<commands::UsageError>().is_some()
        {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
