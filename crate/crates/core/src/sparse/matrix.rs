//! Symmetric sparse matrix storage.
//!
//! Entries accumulate as upper-triangle triplets during assembly and are
//! sealed into a full compressed-sparse-row structure by
//! [`SparseSymBuilder::finalize`]. After sealing, both triangles are stored
//! explicitly (mirrored from the upper triangle) so matrix-vector products
//! touch each row contiguously. Duplicate insertions are an integrity error,
//! not summed: covariance blocks must tile the matrix disjointly.

use crate::error::{Error, Result};

/// Accumulates triplets for a symmetric matrix prior to sealing.
#[derive(Debug, Clone)]
pub struct SparseSymBuilder {
    n: usize,
    // normalized to row <= col
    triplets: Vec<(usize, usize, f64)>,
}

impl SparseSymBuilder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix order must be >= 1".into()));
        }
        Ok(Self { n, triplets: Vec::new() })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Records entry `(i, j) = v`; the mirrored entry is implied.
    pub fn insert(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidInput(format!(
                "index ({i}, {j}) out of bounds for order {}",
                self.n
            )));
        }
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite value at ({i}, {j})")));
        }
        let (p, q) = if i <= j { (i, j) } else { (j, i) };
        self.triplets.push((p, q, v));
        Ok(())
    }

    /// Seals the accumulated triplets into CSR form, mirroring off-diagonal
    /// entries so both triangles are stored.
    pub fn finalize(self) -> Result<SparseSymMatrix> {
        let n = self.n;
        let mut expanded = Vec::with_capacity(self.triplets.len() * 2);
        for &(p, q, v) in &self.triplets {
            expanded.push((p, q, v));
            if p != q {
                expanded.push((q, p, v));
            }
        }
        expanded.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in expanded.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                // report in upper-triangle orientation
                let (r, c) = (w[0].0.min(w[0].1), w[0].0.max(w[0].1));
                return Err(Error::DuplicateEntry { row: r, col: c });
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &expanded {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = expanded.iter().map(|t| t.1).collect();
        let values = expanded.iter().map(|t| t.2).collect();
        Ok(SparseSymMatrix { n, row_ptr, col_idx, values })
    }
}

/// A sealed symmetric sparse matrix in CSR form (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Order of the matrix.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of stored entries (mirrored off-diagonal entries count twice).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Sparse matrix-vector product `A v`.
    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: v.len() });
        }
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * v[self.col_idx[k]];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// In-place variant of [`spmv`](Self::spmv) reusing an output buffer.
    pub(crate) fn spmv_into(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * v[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    /// The diagonal as a dense vector; absent entries are 0.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Stored value at `(i, j)`, or 0 if the entry is structurally absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Iterates the stored entries of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    /// Upper-triangle triplets `(i, j, v)` with `i <= j`, row-major order.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).filter_map(move |(j, v)| (j >= i).then_some((i, j, v))))
    }

    /// Maximum absolute row sum; an upper bound on the spectral radius.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    }

    /// Returns a new matrix with `diag` added to the diagonal, inserting
    /// diagonal entries that were structurally absent. The host covariance
    /// gains its observation-noise diagonal this way.
    pub fn add_diagonal(&self, diag: &[f64]) -> Result<SparseSymMatrix> {
        if diag.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: diag.len() });
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.nnz() + self.n);
        let mut values = Vec::with_capacity(self.nnz() + self.n);
        for i in 0..self.n {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut placed = false;
            for k in lo..hi {
                let j = self.col_idx[k];
                if !placed && j > i {
                    col_idx.push(i);
                    values.push(diag[i]);
                    placed = true;
                }
                if j == i {
                    col_idx.push(j);
                    values.push(self.values[k] + diag[i]);
                    placed = true;
                } else {
                    col_idx.push(j);
                    values.push(self.values[k]);
                }
            }
            if !placed {
                col_idx.push(i);
                values.push(diag[i]);
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(SparseSymMatrix { n: self.n, row_ptr, col_idx, values })
    }
}
