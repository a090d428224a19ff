use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use sparse_gp_cli::commands::{
    benchmark::run_benchmark, predict::run_predict, run_synth, train::run_train,
};
use sparse_gp_cli::config::RunConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Plain,
    Augmented,
    Constrained,
}

impl From<ObjectiveArg> for sparse_gp::Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Plain => sparse_gp::Objective::Plain,
            ObjectiveArg::Augmented => sparse_gp::Objective::Augmented,
            ObjectiveArg::Constrained => sparse_gp::Objective::Constrained,
        }
    }
}

/// Sparse exact Gaussian process regression: train, predict, benchmark.
#[derive(Parser)]
#[command(name = "sparse-gp", version, about)]
struct Cli {
    /// JSON run configuration; flags below override individual keys.
    #[arg(long, global = true, default_value = "config.json")]
    config: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    iterations: Option<usize>,
    #[arg(long, global = true, value_enum)]
    objective: Option<ObjectiveArg>,
    #[arg(long, global = true)]
    sparsity_requirement: Option<f64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Export the assembled covariance in Matrix Market format after training.
    #[arg(long, global = true)]
    export_covariance: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train hyperparameters by MCMC and write model artifacts.
    Train,
    /// Evaluate the posterior over the configured grid.
    Predict,
    /// Measure assembly wall time across worker counts.
    Benchmark,
    /// Materialize the configured synthetic dataset as a CSV file.
    Synth {
        /// Output file; defaults to `<output_dir>/synthetic.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(batch_size) = cli.batch_size {
        cfg.batch_size = batch_size;
    }
    if let Some(iterations) = cli.iterations {
        cfg.iterations = iterations;
    }
    if let Some(objective) = cli.objective {
        cfg.objective = objective.into();
    }
    if let Some(req) = cli.sparsity_requirement {
        cfg.sparsity_requirement = req;
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if cli.export_covariance {
        cfg.export_covariance = true;
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut cfg = RunConfig::load(&cli.config)?;
    apply_overrides(&mut cfg, &cli);
    match &cli.command {
        Command::Train => {
            run_train(&cfg)?;
        }
        Command::Predict => {
            run_predict(&cfg)?;
        }
        Command::Benchmark => {
            run_benchmark(&cfg)?;
        }
        Command::Synth { out } => {
            run_synth(&cfg, out.clone())?;
        }
    }
    Ok(())
}
