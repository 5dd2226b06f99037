use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mergm_core::gof::ChainStart;
use mergm_core::workbench::{run_to_exit, Mode, RunConfig};

/// Multilevel ERGM toolkit: statistics, simulation, estimation and goodness of fit.
#[derive(Parser)]
#[command(name = "mergm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Observed statistic values, overall and per group.
    Stats(Common),
    /// Per-group descriptive table.
    Describe(Common),
    /// Sample networks at given parameters.
    Simulate(Common),
    /// Fit a model.
    Estimate(Common),
    /// Goodness of fit of a previous fit.
    Gof(Common),
    /// Correlations between the estimates of a previous fit.
    Correlate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Start {
    Observed,
    Empty,
}

#[derive(Args)]
struct Common {
    /// Node table (`id,level,group,<attributes>`).
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Edge table (`level,from,to,wave`).
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Node table of the second wave.
    #[arg(long)]
    nodes_wave2: Option<PathBuf>,
    /// Model JSON.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Chain settings JSON.
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Estimation settings JSON.
    #[arg(long)]
    settings: Option<PathBuf>,
    /// Fit JSON (default: fit.json in the output directory).
    #[arg(long)]
    fit: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "MERGM_OUT", default_value = "out")]
    out: PathBuf,
    /// Keep only objects used by at least two actors.
    #[arg(long)]
    min_usage_filter: bool,
    /// Threshold for --min-usage-filter.
    #[arg(long, default_value_t = 2, requires = "min_usage_filter")]
    min_users: u32,
    /// Hold wave-1 actor ties fixed and model wave-2 object and usage ties.
    #[arg(long)]
    lagged: bool,
    /// Starting network of the goodness-of-fit chain.
    #[arg(long, value_enum, default_value = "observed")]
    gof_start: Start,
    /// Unnormalized genre diversity in `describe`.
    #[arg(long)]
    raw_diversity: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, c) = match cli.command {
        Command::Stats(c) => (Mode::Stats, c),
        Command::Describe(c) => (Mode::Describe, c),
        Command::Simulate(c) => (Mode::Simulate, c),
        Command::Estimate(c) => (Mode::Estimate, c),
        Command::Gof(c) => (Mode::Gof, c),
        Command::Correlate(c) => (Mode::Correlate, c),
    };
    let cfg = RunConfig {
        nodes: c.nodes,
        edges: c.edges,
        nodes_wave2: c.nodes_wave2,
        model: c.model,
        chain: c.chain,
        settings: c.settings,
        fit: c.fit,
        out: c.out,
        seed: c.seed,
        min_usage: c.min_usage_filter.then_some(c.min_users),
        lagged: c.lagged,
        gof_start: match c.gof_start {
            Start::Observed => ChainStart::Observed,
            Start::Empty => ChainStart::Empty,
        },
        raw_diversity: c.raw_diversity,
    };
    ExitCode::from(run_to_exit(mode, &cfg) as u8)
}
