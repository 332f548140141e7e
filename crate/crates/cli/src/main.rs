//! `hm` — state-space GP regression with Hida-Matérn kernels.
//!
//! Subcommands: `fit`, `predict`, `sample`, `approx`, `bench`, `condition`.
//! Every command reads one JSON config (flags override fields), writes its
//! outputs under `--out`, and is deterministic given (config, seed).
//! Diagnostics go to standard error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod io;

use config::ExperimentConfig;

#[derive(Debug)]
pub enum CliError {
    /// bad invocation or config; exits with status 2
    Usage(String),
    /// runtime failure (I/O, numerics); exits with status 1
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<hida_matern::Error> for CliError {
    fn from(e: hida_matern::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "hm", version, about = "Linear-time GP regression with Hida-Matérn kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Input data CSV (overrides the config's `data` field)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Random seed (overrides the config's `seed` field)
    #[arg(long)]
    seed: Option<u64>,
    /// Skip hyperparameter optimization (use the config's kernel as-is)
    #[arg(long)]
    no_opt: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fit kernel hyperparameters by maximizing the marginal likelihood
    Fit(CommonArgs),
    /// Posterior mean/variance at query times
    Predict(CommonArgs),
    /// Draw prior sample paths
    Sample(CommonArgs),
    /// Approximate a reference kernel by a mixture
    Approx(CommonArgs),
    /// Timing and accuracy of the state-space path on synthetic data
    Bench(CommonArgs),
    /// Condition-number study of the state matrices
    Condition(CommonArgs),
}

impl CommonArgs {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(data) = &self.data {
            cfg.data = Some(data.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => {
            let cfg = args.load()?;
            commands::fit::run(&cfg, &args.out, args.no_opt)
        }
        Command::Predict(args) => {
            let cfg = args.load()?;
            commands::predict::run(&cfg, &args.out)
        }
        Command::Sample(args) => {
            let cfg = args.load()?;
            commands::sample::run(&cfg, &args.out)
        }
        Command::Approx(args) => {
            let cfg = args.load()?;
            commands::approx::run(&cfg, &args.out)
        }
        Command::Bench(args) => {
            let cfg = args.load()?;
            commands::bench::run(&cfg, &args.out)
        }
        Command::Condition(args) => {
            let cfg = args.load()?;
            commands::condition::run(&cfg, &args.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
