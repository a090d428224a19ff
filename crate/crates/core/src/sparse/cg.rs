//! Conjugate gradient solver for symmetric positive definite systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::matrix::SparseSymMatrix;

/// Preconditioner choice for [`cg_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    None,
    Jacobi,
}

/// Conjugate gradient configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CGConfig {
    /// Convergence threshold on `||A x - b|| / ||b||`.
    pub rel_tolerance: f64,
    /// Iteration cap; `None` means `10 * n`.
    pub max_iters: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for CGConfig {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-8,
            max_iters: None,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

/// Outcome of a conjugate gradient solve.
///
/// Non-convergence within the iteration cap is reported through `converged`,
/// not as an error; callers decide whether a loose solution is usable.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `||A x - b|| / ||b||` (0 when `b` is the zero vector).
    pub rel_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` by (optionally Jacobi-preconditioned) conjugate gradients.
///
/// `A` must be symmetric positive definite; a NaN or nonpositive curvature
/// encountered during the recurrence is reported as a numerical breakdown.
pub fn cg_solve(a: &SparseSymMatrix, b: &[f64], cfg: &CGConfig) -> Result<CgSolution> {
    let n = a.order();
    if b.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: b.len() });
    }
    if !(cfg.rel_tolerance > 0.0 && cfg.rel_tolerance < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rel_tolerance must lie in (0, 1), got {}",
            cfg.rel_tolerance
        )));
    }
    let max_iters = cfg.max_iters.unwrap_or(10 * n).max(1);

    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(CgSolution { x: vec![0.0; n], iterations: 0, rel_residual: 0.0, converged: true });
    }

    let inv_diag = match cfg.preconditioner {
        Preconditioner::None => None,
        Preconditioner::Jacobi => {
            let d = a.diagonal();
            if d.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
                return Err(Error::NumericalBreakdown(
                    "jacobi preconditioner requires a positive diagonal".into(),
                ));
            }
            Some(d.iter().map(|v| 1.0 / v).collect::<Vec<f64>>())
        }
    };
    let apply_precond = |r: &[f64]| -> Vec<f64> {
        match &inv_diag {
            Some(m) => r.iter().zip(m).map(|(x, w)| x * w).collect(),
            None => r.to_vec(),
        }
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut res_norm = norm(&r);
    if res_norm <= cfg.rel_tolerance * b_norm {
        return Ok(CgSolution { x, iterations: 0, rel_residual: res_norm / b_norm, converged: true });
    }
    let mut z = apply_precond(&r);
    let mut p = z.clone();
    let mut rho = dot(&r, &z);
    let mut q = vec![0.0; n];

    for it in 1..=max_iters {
        a.spmv_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !pq.is_finite() {
            return Err(Error::NumericalBreakdown("NaN in conjugate gradient curvature".into()));
        }
        if pq <= 0.0 {
            return Err(Error::NumericalBreakdown(format!(
                "nonpositive curvature {pq:.3e} at iteration {it}; matrix not positive definite"
            )));
        }
        let alpha = rho / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        res_norm = norm(&r);
        if !res_norm.is_finite() {
            return Err(Error::NumericalBreakdown("NaN residual in conjugate gradient".into()));
        }
        if res_norm <= cfg.rel_tolerance * b_norm {
            return Ok(CgSolution {
                x,
                iterations: it,
                rel_residual: res_norm / b_norm,
                converged: true,
            });
        }
        z = apply_precond(&r);
        let rho_new = dot(&r, &z);
        let beta = rho_new / rho;
        rho = rho_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }

    Ok(CgSolution {
        x,
        iterations: max_iters,
        rel_residual: res_norm / b_norm,
        converged: false,
    })
}
