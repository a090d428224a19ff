//! Flat hyperparameter vector with a named layout.
//!
//! All kernel and noise hyperparameters live in one ordered vector so the
//! sampler can treat them uniformly. The layout, fixed by
//! `(n1, n2, dim, core kind)`, is:
//!
//! ```text
//! [ noise_variance,
//!   signal_variance, length_scale,        (only with a squared-exponential core)
//!   base_radius,
//!   a[0][0], beta[0][0], r[0][0], x0[0][0][0..dim],   (bump blocks, row-major
//!   ...                                                over sum index i then
//!   a[n1-1][n2-1], ..., x0[n1-1][n2-1][dim-1],         bump index j)
//!   prior_mean ]
//! ```
//!
//! For example `n1 = 2, n2 = 4, dim = 3` without a core kernel gives
//! `1 + 1 + 2*4*(3 + 3) + 1 = 51` entries. Everything except the bump
//! centers and the prior mean is positivity-constrained and proposed in log
//! space during training.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::assembly::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{BumpParams, CoreKernelSpec, Point, SparsityKernelSpec};

/// Shape of the multiplicative core kernel, without its parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreKind {
    None,
    SquaredExponential,
}

impl CoreKind {
    fn param_count(self) -> usize {
        match self {
            CoreKind::None => 0,
            CoreKind::SquaredExponential => 2,
        }
    }
}

/// What a given vector slot holds; drives proposal and validation rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Positivity-constrained scale parameter (noise, core, radii, a, beta).
    Positive,
    /// Bump center coordinate `k`; proposed linearly, clipped to the domain.
    Center(usize),
    /// Constant prior mean in observation units; unconstrained.
    PriorMean,
}

/// Index layout of a [`HyperparamVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HyperparamLayout {
    pub n1: usize,
    pub n2: usize,
    pub dim: usize,
    pub core: CoreKind,
}

impl HyperparamLayout {
    pub fn new(n1: usize, n2: usize, dim: usize, core: CoreKind) -> Result<Self> {
        if n1 == 0 || n2 == 0 || dim == 0 {
            return Err(Error::InvalidInput("layout requires n1, n2, dim >= 1".into()));
        }
        Ok(Self { n1, n2, dim, core })
    }

    pub fn len(&self) -> usize {
        1 + self.core.param_count() + 1 + self.n1 * self.n2 * (3 + self.dim) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx_noise(&self) -> usize {
        0
    }

    pub fn idx_base_radius(&self) -> usize {
        1 + self.core.param_count()
    }

    /// Start of the `(i, j)` bump block: `a, beta, r, x0[0..dim]`.
    pub fn idx_bump(&self, i: usize, j: usize) -> usize {
        self.idx_base_radius() + 1 + (i * self.n2 + j) * (3 + self.dim)
    }

    pub fn idx_prior_mean(&self) -> usize {
        self.len() - 1
    }

    pub fn kind_of(&self, idx: usize) -> ParamKind {
        if idx == self.idx_prior_mean() {
            return ParamKind::PriorMean;
        }
        let bumps_start = self.idx_base_radius() + 1;
        if idx >= bumps_start {
            let offset = (idx - bumps_start) % (3 + self.dim);
            if offset >= 3 {
                return ParamKind::Center(offset - 3);
            }
        }
        ParamKind::Positive
    }

    pub fn names(&self) -> Vec<String> {
        let mut names = vec!["noise_variance".to_string()];
        if self.core == CoreKind::SquaredExponential {
            names.push("signal_variance".into());
            names.push("length_scale".into());
        }
        names.push("base_radius".into());
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                names.push(format!("a[{i}][{j}]"));
                names.push(format!("beta[{i}][{j}]"));
                names.push(format!("r[{i}][{j}]"));
                for k in 0..self.dim {
                    names.push(format!("x0[{i}][{j}][{k}]"));
                }
            }
        }
        names.push("prior_mean".into());
        names
    }
}

/// The ordered vector of all trainable hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparamVector {
    layout: HyperparamLayout,
    values: Vec<f64>,
}

impl HyperparamVector {
    pub fn new(layout: HyperparamLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::LengthMismatch { expected: layout.len(), got: values.len() });
        }
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "hyperparameter {idx} is not finite"
                )));
            }
            if layout.kind_of(idx) == ParamKind::Positive && v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "hyperparameter {idx} must be > 0, got {v}"
                )));
            }
        }
        Ok(Self { layout, values })
    }

    pub fn layout(&self) -> &HyperparamLayout {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_variance(&self) -> f64 {
        self.values[self.layout.idx_noise()]
    }

    pub fn base_radius(&self) -> f64 {
        self.values[self.layout.idx_base_radius()]
    }

    pub fn prior_mean(&self) -> f64 {
        self.values[self.layout.idx_prior_mean()]
    }

    /// Materializes the kernel specs this vector parameterizes.
    pub fn to_specs(&self) -> Result<(CoreKernelSpec, SparsityKernelSpec)> {
        let l = &self.layout;
        let core = match l.core {
            CoreKind::None => CoreKernelSpec::None,
            CoreKind::SquaredExponential => {
                CoreKernelSpec::squared_exponential(self.values[1], self.values[2])?
            }
        };
        let mut sums = Vec::with_capacity(l.n1);
        for i in 0..l.n1 {
            let mut row = Vec::with_capacity(l.n2);
            for j in 0..l.n2 {
                let base = l.idx_bump(i, j);
                let x0 = Point::new(self.values[base + 3..base + 3 + l.dim].to_vec())?;
                row.push(BumpParams::new(
                    self.values[base],
                    self.values[base + 1],
                    self.values[base + 2],
                    x0,
                )?);
            }
            sums.push(row);
        }
        let spec = SparsityKernelSpec::new(sums, self.base_radius())?;
        Ok((core, spec))
    }

    pub fn to_document(&self) -> HyperparamDocument {
        HyperparamDocument {
            schema_version: SCHEMA_VERSION,
            n1: self.layout.n1,
            n2: self.layout.n2,
            dim: self.layout.dim,
            core: self.layout.core,
            names: self.layout.names(),
            values: self.values.clone(),
        }
    }

    pub fn from_document(doc: &HyperparamDocument) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported hyperparameter schema version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        let layout = HyperparamLayout::new(doc.n1, doc.n2, doc.dim, doc.core)?;
        if doc.names != layout.names() {
            return Err(Error::InvalidInput(
                "hyperparameter names do not match the declared layout".into(),
            ));
        }
        Self::new(layout, doc.values.clone())
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, &self.to_document())?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let doc: HyperparamDocument = serde_json::from_reader(file)?;
        Self::from_document(&doc)
    }
}

pub const SCHEMA_VERSION: u32 = 1;

/// Serialized form of a trained hyperparameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperparamDocument {
    pub schema_version: u32,
    pub n1: usize,
    pub n2: usize,
    pub dim: usize,
    pub core: CoreKind,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

/// Heuristic starting point for training.
///
/// Base radius is half the domain diameter, bump radii are `diameter / n2`,
/// amplitudes and shapes start at 1, bump centers sit on a coarse grid of
/// cell midpoints over the bounding box, noise starts at 1% of `var(y)`
/// (floored at 1e-6), the prior mean at `mean(y)`, and a squared-exponential
/// core (when enabled) at unit signal variance with length scale equal to
/// half the diameter.
pub fn initial_hyperparams(
    ds: &Dataset,
    n1: usize,
    n2: usize,
    core: CoreKind,
) -> Result<HyperparamVector> {
    let layout = HyperparamLayout::new(n1, n2, ds.dim(), core)?;
    let bbox = ds.bounding_box();
    let diameter = bbox.diameter();
    let dim = ds.dim();

    let y = ds.y();
    let n = y.len() as f64;
    let mean_y = y.iter().sum::<f64>() / n;
    let var_y = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum::<f64>() / n;
    let noise0 = (0.01 * var_y).max(1e-6);

    // coarse grid of cell midpoints covering all n1 * n2 centers
    let cells_per_dim = (1..)
        .find(|g: &usize| g.pow(dim as u32) >= n1 * n2)
        .expect("grid size exists");
    let mut centers = Vec::with_capacity(n1 * n2);
    'outer: for flat in 0.. {
        let mut idx = flat;
        let mut c = Vec::with_capacity(dim);
        for k in 0..dim {
            let cell = idx % cells_per_dim;
            idx /= cells_per_dim;
            let span = bbox.upper()[k] - bbox.lower()[k];
            c.push(bbox.lower()[k] + (cell as f64 + 0.5) * span / cells_per_dim as f64);
        }
        centers.push(c);
        if centers.len() == n1 * n2 {
            break 'outer;
        }
    }

    let mut values = vec![0.0; layout.len()];
    values[layout.idx_noise()] = noise0;
    if core == CoreKind::SquaredExponential {
        values[1] = 1.0;
        values[2] = 0.5 * diameter;
    }
    values[layout.idx_base_radius()] = 0.5 * diameter;
    for i in 0..n1 {
        for j in 0..n2 {
            let base = layout.idx_bump(i, j);
            values[base] = 1.0;
            values[base + 1] = 1.0;
            values[base + 2] = diameter / n2 as f64;
            let center = &centers[i * n2 + j];
            values[base + 3..base + 3 + dim].copy_from_slice(center);
        }
    }
    values[layout.idx_prior_mean()] = mean_y;
    HyperparamVector::new(layout, values)
}
