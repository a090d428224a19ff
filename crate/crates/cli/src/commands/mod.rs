//! Command implementations shared between the binary and integration tests.

pub mod benchmark;
pub mod predict;
pub mod train;

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sparse_gp::{Dataset, HyperparamDocument, HyperparamVector};

use crate::config::{DataSource, RunConfig};
use crate::ingest::{dataset_from_raw, ingest_csv, IngestReport, Normalization};
use crate::synth::generate_synthetic;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Trained model artifact: hyperparameters plus the coordinate
/// normalization needed to map raw queries into kernel space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub hyperparams: HyperparamDocument,
    pub normalization: Normalization,
}

impl ModelFile {
    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let file = std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> anyhow::Result<(HyperparamVector, Normalization)> {
        let file = std::fs::File::open(path)
            .with_context(|| format!("cannot open model {}", path.display()))?;
        let doc: ModelFile = serde_json::from_reader(file)?;
        anyhow::ensure!(
            doc.schema_version == MODEL_SCHEMA_VERSION,
            "unsupported model schema version {}",
            doc.schema_version
        );
        let h = HyperparamVector::from_document(&doc.hyperparams)?;
        Ok((h, doc.normalization))
    }
}

/// A dataset loaded from either source, normalized to the unit box.
pub struct LoadedData {
    pub dataset: Dataset,
    pub normalization: Normalization,
    pub coord_names: Vec<String>,
    pub raw_coords: Vec<Vec<f64>>,
    pub raw_values: Vec<f64>,
    pub raw_noise: Option<Vec<f64>>,
    pub report: Option<IngestReport>,
}

/// The `synth` command: materialize the configured synthetic dataset.
pub fn run_synth(cfg: &RunConfig, out: Option<std::path::PathBuf>) -> anyhow::Result<std::path::PathBuf> {
    let spec = match &cfg.data {
        DataSource::Synthetic(spec) => spec,
        DataSource::Csv(_) => anyhow::bail!("synth requires a synthetic data source in the config"),
    };
    let (coords, values) = generate_synthetic(spec)?;
    let dim = coords[0].len();
    let path = out.unwrap_or_else(|| cfg.output_dir.join("synthetic.csv"));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let names: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
    crate::ingest::write_dataset_csv(&path, &names, "value", None, &coords, &values, None)?;
    println!("wrote {} rows to {}", coords.len(), path.display());
    Ok(path)
}

/// Loads the configured data source.
pub fn load_data(cfg: &RunConfig) -> anyhow::Result<LoadedData> {
    match &cfg.data {
        DataSource::Csv(schema) => {
            let data = ingest_csv(schema)?;
            Ok(LoadedData {
                dataset: data.dataset,
                normalization: data.normalization,
                coord_names: schema.coords.clone(),
                raw_coords: data.raw_coords,
                raw_values: data.raw_values,
                raw_noise: data.raw_noise,
                report: Some(data.report),
            })
        }
        DataSource::Synthetic(spec) => {
            let (raw_coords, raw_values) = generate_synthetic(spec)?;
            let (dataset, normalization) = dataset_from_raw(&raw_coords, &raw_values, None)?;
            let dim = raw_coords[0].len();
            Ok(LoadedData {
                dataset,
                normalization,
                coord_names: (0..dim).map(|k| format!("x{k}")).collect(),
                raw_coords,
                raw_values,
                raw_noise: None,
                report: None,
            })
        }
    }
}
