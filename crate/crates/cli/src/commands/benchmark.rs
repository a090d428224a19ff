//! The `benchmark` command: measured vs modeled assembly scaling.

use std::path::PathBuf;

use anyhow::Context;
use sparse_gp::{initial_hyperparams, plan_batches, run_scaling_benchmark, ScalingRow};

use crate::commands::load_data;
use crate::config::RunConfig;

pub fn run_benchmark(cfg: &RunConfig) -> anyhow::Result<(PathBuf, Vec<ScalingRow>)> {
    let bench = cfg.benchmark.clone().unwrap_or_default();
    anyhow::ensure!(!bench.worker_counts.is_empty(), "benchmark needs worker counts");

    let data = load_data(cfg)?;
    let h = initial_hyperparams(&data.dataset, cfg.n1, cfg.n2, cfg.core)?;
    let (core, spec) = h.to_specs()?;
    let b = cfg.batch_size.clamp(1, data.dataset.len());
    let plan = plan_batches(data.dataset.len(), b)?;

    let rows = run_scaling_benchmark(&data.dataset, &plan, &core, &spec, &bench.worker_counts)?;

    std::fs::create_dir_all(&cfg.output_dir)?;
    let out_path = cfg.output_dir.join("benchmark.csv");
    let mut w = csv::Writer::from_path(&out_path)
        .with_context(|| format!("cannot create {}", out_path.display()))?;
    w.write_record(["workers", "wall_time_s", "model_time_s"])?;
    for row in &rows {
        w.write_record(&[
            row.workers.to_string(),
            format!("{}", row.wall_time_s),
            format!("{}", row.model_time_s),
        ])?;
        println!(
            "workers {:>3}: measured {:.4} s, model {:.4} s (mean block {:.6} s)",
            row.workers, row.wall_time_s, row.model_time_s, row.mean_block_time_s
        );
    }
    w.flush()?;
    println!("wrote {}", out_path.display());
    Ok((out_path, rows))
}
