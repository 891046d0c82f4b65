//! `ising-wrc`: sampling and verification for ferromagnetic Ising models.
//!
//! Every command writes JSON lines to stdout. The exit status is 0 when all
//! checks pass, 1 when some check fails and 2 on usage or input errors.

mod commands;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ising_wrc::analysis::DEFAULT_MATRIX_CAP;
use ising_wrc::exact::DEFAULT_ENUM_CAP;

#[derive(Parser, Debug)]
#[command(name = "ising-wrc", version, about = "Exact and perfect sampling for ferromagnetic Ising models")]
struct Cli {
    /// Largest state space the enumeration oracle may visit.
    #[arg(long, global = true, env = "ISING_ENUM_CAP", default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: u128,

    /// Largest state space for dense transition matrices.
    #[arg(long, global = true, env = "ISING_MATRIX_CAP", default_value_t = DEFAULT_MATRIX_CAP)]
    matrix_cap: u128,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw samples with a perfect sampler or run a Markov chain.
    Sample(SampleArgs),
    /// Run a verification suite on a graph or on random instances.
    Verify(VerifyArgs),
    /// Exact mixing time of a chain against the spectral bound.
    Mixing(MixingArgs),
    /// Canonical-path analysis of the subgraph-world chain.
    Paths {
        #[command(subcommand)]
        command: PathsCommand,
    },
    /// Throughput and coalescence-time measurements.
    Bench(BenchArgs),
    /// Write a generated graph in the text format.
    Gen(GenArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Perfect Ising samples (CFTP, then one R→I step).
    Cftp,
    /// Swendsen-Wang on spins.
    Sw,
    /// Swendsen-Wang on edge subsets.
    SwWrc,
    EfWrc,
    EfSg,
    Sb,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceFormatArg {
    Csv,
    Bin,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of independent samples or chains.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Steps per chain (ignored by cftp).
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    /// Write a trace of the first chain here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub stride: u64,
    #[arg(long, value_enum, default_value_t = TraceFormatArg::Csv)]
    pub trace_format: TraceFormatArg,
    /// CFTP abort threshold on the horizon.
    #[arg(long, default_value_t = ising_wrc::cftp::DEFAULT_MAX_STEPS)]
    pub max_steps: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Equivalence,
    Coupling,
    Holant,
    /// Detailed balance, stationarity and half-step adjointness.
    Balance,
    Gaps,
    Perturb,
    Monotone,
    Paths,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, conflicts_with = "random")]
    pub graph: Option<PathBuf>,
    /// Number of random instances.
    #[arg(long)]
    pub random: Option<usize>,
    /// Maximum vertex count of random instances.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Maximum edge count of random instances.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trials per instance (monotone: comparable pairs; holant: random transforms).
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Args, Debug)]
pub struct MixingArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "ef-wrc")]
    pub chain: String,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: u64,
}

#[derive(Subcommand, Debug)]
enum PathsCommand {
    /// Congestion of the canonical paths, with its checks.
    Congestion {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = ising_wrc::paths::DEFAULT_CONGESTION_MAX_EDGES)]
        max_edges: usize,
    },
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Graph file; defaults to a 10×10 grid.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    /// CFTP runs for the coalescence-time distribution (0 skips it).
    #[arg(long, default_value_t = 1000)]
    pub seeds: u64,
    /// Graph for the CFTP runs; defaults to a 3×3 grid.
    #[arg(long)]
    pub cftp_graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Cycle,
    Grid,
    Complete,
    Er,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Vertex count (grid: side length).
    #[arg(long)]
    pub n: usize,
    /// Grid height (defaults to `n`).
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Edge probability for `er`.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct Caps {
    pub enumeration: u128,
    pub matrix: u128,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps { enumeration: cli.enum_cap, matrix: cli.matrix_cap };
    let result = match cli.command {
        Command::Sample(a) => commands::sample(&a),
        Command::Verify(a) => commands::verify(&a, &caps),
        Command::Mixing(a) => commands::mixing(&a, &caps),
        Command::Paths { command: PathsCommand::Congestion { graph, max_edges } } => {
            commands::congestion(&graph, max_edges)
        }
        Command::Bench(a) => commands::bench(&a),
        Command::Gen(a) => commands::generate(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
