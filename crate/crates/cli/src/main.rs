mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridcoh::solver::{BoundsChoice, SolverChoice};
use gridcoh::{DesignMode, MetricPreset};

/// H2-coherence evaluation and exact topology design for power grids.
#[derive(Debug, Parser)]
#[command(name = "gridcoh", version)]
struct Cli {
    /// More log output (repeat for debug level). `RUST_LOG` takes precedence.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cost of the lines in service (or of a stored design).
    Evaluate(EvaluateArgs),
    /// Optimal line selection under a budget.
    Design(DesignArgs),
    /// Impulse response of the lines in service, with optional CSV export.
    Simulate(SimulateArgs),
    /// Costs of several line selections side by side.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct NetworkArgs {
    /// Network JSON file.
    network: PathBuf,
    /// Metric preset, overriding the metric in the file (coherence when
    /// neither is given).
    #[arg(long, value_enum)]
    metric: Option<Preset>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Also compute the squared norm from the observability Gramian.
    #[arg(long)]
    gramian: bool,
    /// Evaluate the lines selected in this result file instead of the lines in service.
    #[arg(long, value_name = "RESULT")]
    result: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Total number of lines in the design.
    #[arg(long, conflicts_with = "add_lines")]
    budget: Option<usize>,
    /// Number of candidate lines to add (augment mode).
    #[arg(long)]
    add_lines: Option<usize>,
    #[arg(long, value_enum, default_value_t = Bounds::Auto)]
    bounds: Bounds,
    /// Cutset-based fixing, pair rows and raised lower bounds.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    tighten: Switch,
    #[arg(long, value_enum, default_value_t = Solver::Bnb)]
    solver: Solver,
    /// Stop branch-and-bound after this many nodes.
    #[arg(long)]
    node_limit: Option<usize>,
    /// Write the MILP in LP text format.
    #[arg(long, value_name = "PATH")]
    export_model: Option<PathBuf>,
    /// Write the result JSON here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Bus receiving the unit impulse.
    #[arg(long)]
    impulse_bus: usize,
    /// Simulated time in seconds.
    #[arg(long, default_value_t = 400.0)]
    horizon: f64,
    /// RK4 step in seconds.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Write every n-th step to the CSV.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Trajectory CSV output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Comma-separated line indices switched on in addition to the lines in
    /// service. Repeat for each selection.
    #[arg(long = "lines", value_name = "INDICES")]
    lines: Vec<String>,
    /// Include the design stored in this result file.
    #[arg(long, value_name = "RESULT")]
    result: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Frequency,
    Losses,
    Coherence,
}

impl From<Preset> for MetricPreset {
    fn from(p: Preset) -> Self {
        match p {
            Preset::Frequency => MetricPreset::Frequency,
            Preset::Losses => MetricPreset::Losses,
            Preset::Coherence => MetricPreset::Coherence,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Augment,
    Radial,
}

impl From<Mode> for DesignMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Augment => DesignMode::Augment,
            Mode::Radial => DesignMode::Radial,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Bounds {
    Auto,
    Loose,
}

impl From<Bounds> for BoundsChoice {
    fn from(b: Bounds) -> Self {
        match b {
            Bounds::Auto => BoundsChoice::Auto,
            Bounds::Loose => BoundsChoice::Loose,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Solver {
    Bnb,
    Brute,
}

impl From<Solver> for SolverChoice {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Bnb => SolverChoice::Bnb,
            Solver::Brute => SolverChoice::Brute,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = match cli.command {
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Design(a) => commands::design(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Compare(a) => commands::compare(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
