//! The `predict` command: posterior mean/variance over a query grid.

use std::path::PathBuf;

use anyhow::{bail, Context};
use sparse_gp::{assemble_model, posterior_predict, CGConfig, Point};

use crate::commands::{load_data, ModelFile};
use crate::config::RunConfig;

/// Cartesian product of per-dimension linspaces, row-major with the last
/// dimension fastest.
fn build_grid(dims: &[crate::config::GridDim]) -> anyhow::Result<Vec<Vec<f64>>> {
    for d in dims {
        if d.count == 0 {
            bail!("grid dimension needs count >= 1");
        }
        if !(d.min.is_finite() && d.max.is_finite()) {
            bail!("grid bounds must be finite");
        }
    }
    let axes: Vec<Vec<f64>> = dims
        .iter()
        .map(|d| {
            if d.count == 1 {
                vec![d.min]
            } else {
                (0..d.count)
                    .map(|i| d.min + (d.max - d.min) * i as f64 / (d.count - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut grid = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    loop {
        grid.push(idx.iter().enumerate().map(|(k, &i)| axes[k][i]).collect());
        let mut k = axes.len();
        loop {
            if k == 0 {
                return Ok(grid);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub fn run_predict(cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    let predict_cfg = cfg
        .predict
        .as_ref()
        .context("config has no 'predict' section (grid definition)")?;
    let data = load_data(cfg)?;
    let (hyperparams, normalization) = ModelFile::load(&cfg.model_path())?;
    if predict_cfg.grid.len() != data.dataset.dim() {
        bail!(
            "grid has {} dimensions but the dataset has {}",
            predict_cfg.grid.len(),
            data.dataset.dim()
        );
    }
    if normalization.dim() != data.dataset.dim() {
        bail!("model normalization does not match the dataset dimensionality");
    }

    let raw_grid = build_grid(&predict_cfg.grid)?;
    let queries: Vec<Point> = raw_grid
        .iter()
        .map(|raw| Point::new(normalization.normalize(raw)))
        .collect::<Result<_, _>>()?;

    let model = assemble_model(&data.dataset, &hyperparams, &cfg.assembly_options())?;
    let result = posterior_predict(&model, &queries, &CGConfig::default())?;
    if !result.all_converged {
        eprintln!("warning: conjugate gradients hit the iteration cap for some queries");
    }

    std::fs::create_dir_all(&cfg.output_dir)?;
    let out_path = cfg.output_dir.join("predictions.csv");
    let mut w = csv::Writer::from_path(&out_path)
        .with_context(|| format!("cannot create {}", out_path.display()))?;
    let mut header = data.coord_names.clone();
    header.push("mean".into());
    header.push("variance".into());
    w.write_record(&header)?;
    for (qi, q) in queries.iter().enumerate() {
        let raw = normalization.denormalize(q.coords());
        let mut row: Vec<String> = raw.iter().map(|c| format!("{c}")).collect();
        row.push(format!("{}", result.mean[qi]));
        row.push(format!("{}", result.variance[qi]));
        w.write_record(&row)?;
    }
    w.flush()?;
    println!("wrote {} predictions to {}", queries.len(), out_path.display());
    Ok(out_path)
}
