use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod commands;
mod formats;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    /// EM stopped at its iteration cap; output was still written.
    #[error("{0}")]
    Convergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Convergence(_) => 3,
        }
    }
}

impl From<graphlet::GraphletError> for CliError {
    fn from(e: graphlet::GraphletError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Graphlet decomposition of integer-weighted networks.
#[derive(Debug, Parser)]
#[command(name = "graphlet", version)]
struct Args {
    /// Cap on worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose an edge list into weighted cliques
    Decompose(DecomposeArgs),
    /// Sample a ground-truth model and a network from it
    Synth(SynthArgs),
    /// Compare an estimated model against the truth
    Eval(EvalArgs),
    /// Expected accuracy of keeping the heaviest cliques
    AccuracyCurve(CurveArgs),
    /// Candidate-count and redundancy bounds
    Bounds(BoundsArgs),
}

#[derive(Debug, clap::Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Mass fraction below which a clique is dropped
    #[arg(long, default_value_t = 1e-6)]
    pub prune: f64,
    /// Keep the heaviest cliques reaching this accuracy
    #[arg(long)]
    pub target_accuracy: Option<f64>,
    /// Decompose the K-th power of the network
    #[arg(long, value_name = "K")]
    pub power: Option<u32>,
    /// Input holds real-valued rates (decimals allowed)
    #[arg(long)]
    pub exact: bool,
    /// With --exact, peel cliques off the rates instead of running EM
    #[arg(long, requires = "exact")]
    pub peel: bool,
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    pub nodes: usize,
    /// Poisson rate for the number of cliques
    #[arg(long, default_value_t = 30.0)]
    pub lambda_k: f64,
    /// Gamma shape of the coefficients
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Gamma scale of the coefficients
    #[arg(long, default_value_t = 10.0)]
    pub beta: f64,
    /// Membership probability per node and clique
    #[arg(long, default_value_t = 0.04)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reject bases that are not non-expandable
    #[arg(long)]
    pub nonexpandable: bool,
    #[arg(long, default_value_t = 10_000)]
    pub max_rejects: usize,
    /// Round coefficients to integers (at least 1)
    #[arg(long)]
    pub round_mu: bool,
    /// Sample edge weights from the zero-truncated Poisson
    #[arg(long)]
    pub zero_truncated: bool,
    /// Write the noise-free rates instead of a sampled network
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out_model: PathBuf,
    #[arg(long)]
    pub out_network: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub estimate: PathBuf,
    #[arg(long)]
    pub network: PathBuf,
    /// Network file holds real-valued rates
    #[arg(long)]
    pub exact: bool,
    /// Print the column header first
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    #[value(name = "closed_form")]
    ClosedForm,
    #[value(name = "monte_carlo")]
    MonteCarlo,
}

#[derive(Debug, clap::Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
    pub method: Method,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
}

fn run(args: Args) -> Result<(), CliError> {
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match args.command {
        Command::Decompose(a) => commands::decompose(&a),
        Command::Synth(a) => commands::synth(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::AccuracyCurve(a) => commands::accuracy_curve(&a),
        Command::Bounds(a) => commands::bounds(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
