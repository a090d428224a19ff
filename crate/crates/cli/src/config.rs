//! Run configuration: a single JSON document, with CLI flags overriding
//! individual keys.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sparse_gp::{AssemblyOptions, CoreKind, MCMCConfig, Objective, SolverOptions};

use crate::ingest::CsvSchema;
use crate::synth::SyntheticSpec;

/// Where the dataset comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv(CsvSchema),
    Synthetic(SyntheticSpec),
}

/// One dimension of a prediction grid, in raw (de-normalized) coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDim {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictConfig {
    /// Trained model file; defaults to `<output_dir>/hyperparams.json`.
    #[serde(default)]
    pub model: Option<PathBuf>,
    pub grid: Vec<GridDim>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub worker_counts: Vec<usize>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self { worker_counts: vec![1] }
    }
}

/// Solver settings used while training. Looser than the library defaults:
/// MCMC tolerates estimator noise, so fewer probes buy a large speedup.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cg_rel_tolerance: f64,
    pub logdet_probes: usize,
    pub logdet_taylor_terms: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { cg_rel_tolerance: 1e-6, logdet_probes: 10, logdet_taylor_terms: 50 }
    }
}

impl SolverConfig {
    pub fn to_options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        opts.cg.rel_tolerance = self.cg_rel_tolerance;
        opts.logdet.probes = self.logdet_probes;
        opts.logdet.taylor_terms = self.logdet_taylor_terms;
        opts
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: DataSource,
    #[serde(default = "default_n1")]
    pub n1: usize,
    #[serde(default = "default_n2")]
    pub n2: usize,
    #[serde(default = "default_core")]
    pub core: CoreKind,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_proposal_scale")]
    pub proposal_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default = "default_sparsity_requirement")]
    pub sparsity_requirement: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub export_covariance: bool,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub predict: Option<PredictConfig>,
    #[serde(default)]
    pub benchmark: Option<BenchmarkConfig>,
}

fn default_n1() -> usize {
    2
}
fn default_n2() -> usize {
    2
}
fn default_core() -> CoreKind {
    CoreKind::None
}
fn default_batch_size() -> usize {
    1000
}
fn default_workers() -> usize {
    1
}
fn default_iterations() -> usize {
    160
}
fn default_proposal_scale() -> f64 {
    0.1
}
fn default_objective() -> Objective {
    Objective::Plain
}
fn default_sparsity_requirement() -> f64 {
    1.0
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("malformed config {}: {e}", path.display()))?;
        Ok(cfg)
    }

    pub fn mcmc_config(&self) -> MCMCConfig {
        MCMCConfig {
            iterations: self.iterations,
            proposal_scale: self.proposal_scale,
            seed: self.seed,
            objective: self.objective,
            sparsity_requirement: self.sparsity_requirement,
        }
    }

    pub fn assembly_options(&self) -> AssemblyOptions {
        AssemblyOptions { batch_size: self.batch_size, workers: self.workers }
    }

    pub fn solver_options(&self) -> SolverOptions {
        self.solver.clone().unwrap_or_default().to_options()
    }

    pub fn model_path(&self) -> PathBuf {
        match self.predict.as_ref().and_then(|p| p.model.clone()) {
            Some(p) => p,
            None => self.output_dir.join("hyperparams.json"),
        }
    }
}
