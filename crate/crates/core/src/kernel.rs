//! Compactly-supported, non-stationary kernel functions.
//!
//! The covariance model is a product `k_c(x1, x2) * k_s(x1, x2)` where `k_c`
//! is an ordinary core kernel (identity or squared exponential) and `k_s` is
//! a sparsity-discovering factor
//!
//! ```text
//! k_s(x1, x2) = kstat(||x1 - x2||) * sum_i f_i(x1) * f_i(x2)
//! ```
//!
//! built from a compactly-supported stationary kernel `kstat` and sums of
//! smooth bump functions `f_i`. Every factor is exactly zero outside a
//! bounded region, so covariance matrices assembled from these kernels
//! contain exact zeros — sparsity is a property of the kernel, not of any
//! approximation. All support tests use strict comparisons on the squared
//! distance so zero/non-zero decisions are bit-reproducible.
//!
//! This module also provides the analytic upper bound on the fraction of
//! non-zero covariances implied by the bump supports, used by training to
//! constrain or bias hyperparameter search toward sparse matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in the (normalized) input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Creates a point; coordinates must be finite and non-empty.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have dim >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("point coordinates must be finite".into()));
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Squared Euclidean distance, accumulated in coordinate order.
///
/// Every kernel in this crate derives its support decision from this one
/// function so that all evaluation paths agree bit-for-bit.
#[inline]
pub(crate) fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

fn check_dims(x1: &Point, x2: &Point) -> Result<()> {
    if x1.dim() != x2.dim() {
        return Err(Error::DimensionMismatch {
            expected: x1.dim(),
            got: x2.dim(),
        });
    }
    Ok(())
}

/// Axis-aligned box bounding the input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidInput(
                "domain box bounds must be non-empty and of equal length".into(),
            ));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                return Err(Error::InvalidInput(format!(
                    "domain box requires finite upper > lower, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    /// Euclidean length of the box diagonal.
    pub fn diameter(&self) -> f64 {
        sq_distance(&self.lower, &self.upper).sqrt()
    }

    /// Box grown by `frac` of each side length in both directions.
    pub fn expanded(&self, frac: f64) -> DomainBox {
        let lower = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| lo - frac * (hi - lo))
            .collect();
        let upper = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi + frac * (hi - lo))
            .collect();
        DomainBox { lower, upper }
    }

    pub fn clamp(&self, k: usize, v: f64) -> f64 {
        v.clamp(self.lower[k], self.upper[k])
    }
}

/// Parameters of a single bump function: amplitude, shape, radius, center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub a: f64,
    pub beta: f64,
    pub r: f64,
    pub x0: Point,
}

impl BumpParams {
    pub fn new(a: f64, beta: f64, r: f64, x0: Point) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::InvalidInput(format!("bump amplitude must be >= 0, got {a}")));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidInput(format!("bump shape must be > 0, got {beta}")));
        }
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::InvalidInput(format!("bump radius must be > 0, got {r}")));
        }
        Ok(Self { a, beta, r, x0 })
    }
}

/// The sparsity-discovering kernel: `n1` sums of `n2` bumps each, multiplied
/// by a compactly-supported stationary factor of radius `base_radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityKernelSpec {
    sums: Vec<Vec<BumpParams>>,
    base_radius: f64,
}

impl SparsityKernelSpec {
    pub fn new(sums: Vec<Vec<BumpParams>>, base_radius: f64) -> Result<Self> {
        if sums.is_empty() {
            return Err(Error::InvalidInput("need at least one bump sum (n1 >= 1)".into()));
        }
        let n2 = sums[0].len();
        if n2 == 0 {
            return Err(Error::InvalidInput("need at least one bump per sum (n2 >= 1)".into()));
        }
        let dim = sums[0][0].x0.dim();
        for row in &sums {
            if row.len() != n2 {
                return Err(Error::InvalidInput(
                    "all bump sums must have the same number of bumps".into(),
                ));
            }
            for b in row {
                if b.x0.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: b.x0.dim(),
                    });
                }
            }
        }
        if !base_radius.is_finite() || base_radius <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "base radius must be > 0, got {base_radius}"
            )));
        }
        Ok(Self { sums, base_radius })
    }

    pub fn n1(&self) -> usize {
        self.sums.len()
    }

    pub fn n2(&self) -> usize {
        self.sums[0].len()
    }

    pub fn dim(&self) -> usize {
        self.sums[0][0].x0.dim()
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn sums(&self) -> &[Vec<BumpParams>] {
        &self.sums
    }
}

/// Delta-function kernel: covariances are switched on only between anchor
/// points, with coefficient vectors `hf` and `hg`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaKernelSpec {
    anchor_points: Vec<Point>,
    hf: Vec<f64>,
    hg: Vec<f64>,
}

impl DeltaKernelSpec {
    pub fn new(anchor_points: Vec<Point>, hf: Vec<f64>, hg: Vec<f64>) -> Result<Self> {
        if hf.len() != anchor_points.len() || hg.len() != anchor_points.len() {
            return Err(Error::LengthMismatch {
                expected: anchor_points.len(),
                got: hf.len().max(hg.len()),
            });
        }
        if hf.iter().chain(&hg).any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::InvalidInput("delta coefficients must be >= 0".into()));
        }
        Ok(Self { anchor_points, hf, hg })
    }

    /// Sum of `hf` coefficients over anchors exactly equal to `x`.
    fn f_at(&self, x: &Point) -> f64 {
        self.anchor_points
            .iter()
            .zip(&self.hf)
            .filter(|(p, _)| p.coords == x.coords)
            .map(|(_, h)| h)
            .sum()
    }

    fn g_at(&self, x: &Point) -> f64 {
        self.anchor_points
            .iter()
            .zip(&self.hg)
            .filter(|(p, _)| p.coords == x.coords)
            .map(|(_, h)| h)
            .sum()
    }
}

/// Multiplicative core kernel applied on top of the sparsity factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoreKernelSpec {
    /// `k_c == 1`; the covariance is the sparsity kernel alone.
    None,
    SquaredExponential { signal_variance: f64, length_scale: f64 },
}

impl CoreKernelSpec {
    pub fn squared_exponential(signal_variance: f64, length_scale: f64) -> Result<Self> {
        if !signal_variance.is_finite() || signal_variance <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "signal variance must be > 0, got {signal_variance}"
            )));
        }
        if !length_scale.is_finite() || length_scale <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "length scale must be > 0, got {length_scale}"
            )));
        }
        Ok(Self::SquaredExponential { signal_variance, length_scale })
    }
}

/// Evaluates one bump function at `x`.
///
/// Inside the support (`||x - x0|| < r`, strict) the value is
/// `a * exp(-beta / (1 - d^2/r^2) + beta)`, which is `a` at the center and
/// decays smoothly to exactly 0 at the boundary; outside it is exactly 0.
pub fn bump_eval(p: &BumpParams, x: &Point) -> Result<f64> {
    check_dims(&p.x0, x)?;
    Ok(bump_eval_d2(p, sq_distance(p.x0.coords(), x.coords())))
}

/// Bump value from a precomputed squared distance to the center.
#[inline]
fn bump_eval_d2(p: &BumpParams, d2: f64) -> f64 {
    let r2 = p.r * p.r;
    if d2 >= r2 {
        return 0.0;
    }
    // 1 - d2/r2 can round to 0 arbitrarily close to the boundary; the
    // resulting -inf exponent still yields exp(-inf) == 0 as required.
    let denom = 1.0 - d2 / r2;
    p.a * (-p.beta / denom + p.beta).exp()
}

/// Evaluates a sum of bump functions (one of the `f_i`) at `x`.
pub fn bump_sum_eval(f: &[BumpParams], x: &Point) -> Result<f64> {
    let mut acc = 0.0;
    for b in f {
        acc += bump_eval(b, x)?;
    }
    Ok(acc)
}

const STATIONARY_SCALE: f64 = 0.26596152026762178; // sqrt(2) / (3 sqrt(pi))

/// Compactly-supported stationary kernel value from a squared distance.
///
/// The `u^2 log(u)` term is taken as 0 at `u == 0` (its analytic limit), and
/// the result is clamped at 0 to absorb last-ulp cancellation noise near the
/// support boundary, where the true value decays like `(1 - u^2)^(5/2)`.
#[inline]
pub(crate) fn compact_stationary_d2(d2: f64, r: f64) -> f64 {
    let r2 = r * r;
    if d2 >= r2 {
        return 0.0;
    }
    let u2 = d2 / r2;
    if u2 >= 1.0 {
        return 0.0;
    }
    let s = (1.0 - u2).sqrt();
    let log_term = if u2 == 0.0 {
        0.0
    } else {
        let u = u2.sqrt();
        3.0 * u2 * (u / (1.0 + s)).ln()
    };
    (STATIONARY_SCALE * (log_term + (2.0 * u2 + 1.0) * s)).max(0.0)
}

/// Evaluates the compactly-supported stationary kernel with support radius `r`.
pub fn compact_stationary_eval(r: f64, x1: &Point, x2: &Point) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidInput(format!("support radius must be > 0, got {r}")));
    }
    check_dims(x1, x2)?;
    Ok(compact_stationary_d2(sq_distance(x1.coords(), x2.coords()), r))
}

/// All `f_i(x)` values for a spec, in sum order.
///
/// Precomputing these per point lets block assembly share the exact same
/// accumulation order as [`sparsity_kernel_eval`].
pub fn bump_values(spec: &SparsityKernelSpec, x: &Point) -> Result<Vec<f64>> {
    spec.sums.iter().map(|f| bump_sum_eval(f, x)).collect()
}

/// The shared product form: `core * (kstat * sum_i f1[i] * f2[i])`.
///
/// Both the public pair evaluators and the batched block computation funnel
/// through this function, so assembled matrices are bit-identical to direct
/// double-loop evaluation.
#[inline]
pub(crate) fn pair_eval_d2(
    core: &CoreKernelSpec,
    base_radius: f64,
    d2: f64,
    f1: &[f64],
    f2: &[f64],
) -> f64 {
    let stat = compact_stationary_d2(d2, base_radius);
    if stat == 0.0 {
        return 0.0;
    }
    let mut prod_sum = 0.0;
    for (a, b) in f1.iter().zip(f2) {
        prod_sum += a * b;
    }
    let ks = stat * prod_sum;
    match core {
        CoreKernelSpec::None => ks,
        CoreKernelSpec::SquaredExponential { signal_variance, length_scale } => {
            let kc = signal_variance * (-0.5 * d2 / (length_scale * length_scale)).exp();
            kc * ks
        }
    }
}

/// Evaluates the sparsity-discovering kernel `k_s(x1, x2)`.
pub fn sparsity_kernel_eval(spec: &SparsityKernelSpec, x1: &Point, x2: &Point) -> Result<f64> {
    composed_kernel_eval(&CoreKernelSpec::None, spec, x1, x2)
}

/// Evaluates the full covariance `k_c(x1, x2) * k_s(x1, x2)`.
pub fn composed_kernel_eval(
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
    x1: &Point,
    x2: &Point,
) -> Result<f64> {
    check_dims(x1, x2)?;
    if x1.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: x1.dim(),
        });
    }
    let d2 = sq_distance(x1.coords(), x2.coords());
    if d2 >= spec.base_radius * spec.base_radius {
        return Ok(0.0);
    }
    let f1 = bump_values(spec, x1)?;
    let f2 = bump_values(spec, x2)?;
    Ok(pair_eval_d2(core, spec.base_radius, d2, &f1, &f2))
}

/// Evaluates the delta-function kernel with stationary radius `r`.
///
/// Non-anchor points contribute exactly 0; anchors `i`, `j` contribute
/// `kstat(d) * (hf_i * hf_j + hg_i * hg_j)`.
pub fn delta_kernel_eval(spec: &DeltaKernelSpec, r: f64, x1: &Point, x2: &Point) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidInput(format!("support radius must be > 0, got {r}")));
    }
    check_dims(x1, x2)?;
    let f1 = spec.f_at(x1);
    let g1 = spec.g_at(x1);
    if f1 == 0.0 && g1 == 0.0 {
        return Ok(0.0);
    }
    let f2 = spec.f_at(x2);
    let g2 = spec.g_at(x2);
    if f2 == 0.0 && g2 == 0.0 {
        return Ok(0.0);
    }
    let stat = compact_stationary_d2(sq_distance(x1.coords(), x2.coords()), r);
    Ok(stat * (f1 * f2 + g1 * g2))
}

/// Volume of a `dim`-dimensional ball of radius `r`.
///
/// Uses the recurrence `V_d = V_{d-2} * 2 pi r^2 / d` with `V_1 = 2r` and
/// `V_2 = pi r^2`, which is exact in the same sense as the gamma-function
/// form `pi^(d/2) r^d / Gamma(d/2 + 1)`.
pub fn sphere_volume(dim: usize, r: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidInput("sphere volume needs dim >= 1".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidInput(format!("sphere radius must be > 0, got {r}")));
    }
    let mut v = if dim % 2 == 0 { 1.0 } else { 2.0 * r };
    let mut d = if dim % 2 == 0 { 2 } else { 3 };
    while d <= dim {
        v *= 2.0 * std::f64::consts::PI * r * r / d as f64;
        d += 2;
    }
    Ok(v)
}

/// Analytic upper bound on the non-zero fraction of the covariance matrix.
///
/// Assumes entirely disjoint bump supports (any overlap only lowers the true
/// fraction) and uniformly distributed data in `domain`:
///
/// ```text
/// s <= sum_i sum_j sum_k Vol(dim, r_ij) * Vol(dim, r_ik) / Vol(domain)^2
/// ```
///
/// The raw value may exceed 1 for large or overlapping supports; callers
/// clamp when reporting. It is compared against user thresholds unclamped
/// only through [`crate::train::constraint_satisfied`].
pub fn sparsity_upper_bound(spec: &SparsityKernelSpec, domain: &DomainBox) -> Result<f64> {
    if spec.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: spec.dim(),
        });
    }
    let dim = domain.dim();
    let vol_domain = domain.volume();
    let mut total = 0.0;
    for row in &spec.sums {
        let vols: Vec<f64> = row
            .iter()
            .map(|b| sphere_volume(dim, b.r))
            .collect::<Result<_>>()?;
        for vj in &vols {
            for vk in &vols {
                total += vj * vk;
            }
        }
    }
    Ok(total / (vol_domain * vol_domain))
}
