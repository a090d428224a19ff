//! The `train` command: MCMC hyperparameter training plus artifact output.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;
use sparse_gp::{
    initial_hyperparams, mcmc_train, sparsity_upper_bound, write_matrix_market, MCMCTrace,
};

use crate::commands::{load_data, LoadedData, ModelFile, MODEL_SCHEMA_VERSION};
use crate::config::RunConfig;

/// Machine-readable training report written next to the model.
#[derive(Debug, Serialize)]
pub struct TrainStats {
    pub n: usize,
    pub dim: usize,
    pub nnz: usize,
    pub empirical_s: f64,
    pub s_bound: f64,
    pub initial_log_likelihood: f64,
    pub best_log_likelihood: f64,
    pub acceptance_rate: f64,
    pub iterations: usize,
    pub tasks_executed: usize,
    pub assembly_wall_time_s: f64,
}

pub struct TrainArtifacts {
    pub model_path: PathBuf,
    pub trace_path: PathBuf,
    pub stats_path: PathBuf,
    pub summary_path: PathBuf,
    pub covariance_path: Option<PathBuf>,
    pub stats: TrainStats,
    pub trace: MCMCTrace,
}

pub fn run_train(cfg: &RunConfig) -> anyhow::Result<TrainArtifacts> {
    let data: LoadedData = load_data(cfg)?;
    if let Some(report) = &data.report {
        if report.rows_dropped > 0 {
            eprintln!(
                "ingest: dropped {} of {} rows (lines {:?})",
                report.rows_dropped, report.rows_read, report.dropped_lines
            );
        }
    }

    let init = initial_hyperparams(&data.dataset, cfg.n1, cfg.n2, cfg.core)?;
    let (trace, model) = mcmc_train(
        &data.dataset,
        init,
        &cfg.mcmc_config(),
        &cfg.assembly_options(),
        &cfg.solver_options(),
    )?;

    let domain = data.dataset.bounding_box().expanded(0.10);
    let s_bound = sparsity_upper_bound(model.spec(), &domain)?;
    let stats = TrainStats {
        n: data.dataset.len(),
        dim: data.dataset.dim(),
        nnz: model.stats().nnz,
        empirical_s: model.stats().empirical_s,
        s_bound,
        initial_log_likelihood: trace.initial.log_likelihood.unwrap_or(f64::NAN),
        best_log_likelihood: trace.best_log_likelihood,
        acceptance_rate: trace.acceptance_rate(),
        iterations: trace.steps.len(),
        tasks_executed: model.stats().tasks_executed,
        assembly_wall_time_s: model.stats().wall_time,
    };

    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("cannot create {}", cfg.output_dir.display()))?;
    let model_path = cfg.output_dir.join("hyperparams.json");
    ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        hyperparams: model.hyperparams().to_document(),
        normalization: data.normalization.clone(),
    }
    .save(&model_path)?;

    let trace_path = cfg.output_dir.join("trace.jsonl");
    let trace_file = std::fs::File::create(&trace_path)?;
    trace.write_jsonl(trace_file)?;

    let stats_path = cfg.output_dir.join("stats.json");
    serde_json::to_writer_pretty(std::fs::File::create(&stats_path)?, &stats)?;

    let covariance_path = if cfg.export_covariance {
        let path = cfg.output_dir.join("covariance.mtx");
        let file = std::fs::File::create(&path)?;
        write_matrix_market(model.kernel_matrix(), file)?;
        Some(path)
    } else {
        None
    };

    let summary_path = cfg.output_dir.join("summary.txt");
    let mut summary = std::fs::File::create(&summary_path)?;
    writeln!(summary, "dataset: {} points in {} dimensions", stats.n, stats.dim)?;
    writeln!(
        summary,
        "covariance: {} non-zeros, empirical s = {:.6}, analytic bound = {:.6}",
        stats.nnz,
        stats.empirical_s,
        stats.s_bound.min(1.0)
    )?;
    writeln!(
        summary,
        "training: {} iterations, acceptance rate {:.3}",
        stats.iterations, stats.acceptance_rate
    )?;
    writeln!(
        summary,
        "log-likelihood: initial {:.4}, best {:.4}",
        stats.initial_log_likelihood, stats.best_log_likelihood
    )?;
    writeln!(summary, "model: {}", model_path.display())?;

    println!(
        "trained {} points: lnL {:.4} -> {:.4}, s <= {:.4}, artifacts in {}",
        stats.n,
        stats.initial_log_likelihood,
        stats.best_log_likelihood,
        stats.s_bound.min(1.0),
        cfg.output_dir.display()
    );

    Ok(TrainArtifacts {
        model_path,
        trace_path,
        stats_path,
        summary_path,
        covariance_path,
        stats,
        trace,
    })
}
