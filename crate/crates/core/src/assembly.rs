//! Batched, parallel assembly of the sparse host covariance matrix.
//!
//! The dataset is split into contiguous batches; every unordered batch pair
//! becomes one block task. A fixed pool of worker threads pulls tasks off a
//! shared queue, computes each covariance block densely with the composed
//! kernel, casts it to coordinate entries (dropping exact zeros and dust
//! below [`DUST_THRESHOLD`]), and sends the sparse block to a single
//! collector that owns all host-matrix insertions. Because compact support
//! produces exact zeros and every entry is computed exactly once, the sealed
//! matrix is bit-identical to a dense brute-force evaluation and independent
//! of worker count or task completion order.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::kernel::{
    bump_values, pair_eval_d2, sq_distance, CoreKernelSpec, DomainBox, Point, SparsityKernelSpec,
};
use crate::sparse::{SparseSymBuilder, SparseSymMatrix};

/// Entries with absolute value below this are dropped when a dense block is
/// cast to sparse form. Compact support already yields exact zeros; the
/// threshold additionally guards against denormal dust, far below any solver
/// tolerance used on these matrices.
pub const DUST_THRESHOLD: f64 = 1e-12;

/// Observations at known locations, plus optional per-point noise variances.
///
/// When `noise_variance` is `None` the observation noise is a scalar
/// hyperparameter supplied at training time.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<Point>,
    y: Vec<f64>,
    noise_variance: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(points: Vec<Point>, y: Vec<f64>, noise_variance: Option<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("dataset must contain at least one point".into()));
        }
        if y.len() != points.len() {
            return Err(Error::LengthMismatch { expected: points.len(), got: y.len() });
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("observations must be finite".into()));
        }
        if let Some(nv) = &noise_variance {
            if nv.len() != points.len() {
                return Err(Error::LengthMismatch { expected: points.len(), got: nv.len() });
            }
            if nv.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::InvalidInput("noise variances must be > 0".into()));
            }
        }
        Ok(Self { points, y, noise_variance })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn noise_variance(&self) -> Option<&[f64]> {
        self.noise_variance.as_deref()
    }

    /// Axis-aligned bounding box of the points. Degenerate dimensions (all
    /// coordinates equal) are widened by 0.5 on each side so the box always
    /// has positive volume.
    pub fn bounding_box(&self) -> DomainBox {
        let dim = self.dim();
        let mut lower = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for p in &self.points {
            for (k, c) in p.coords().iter().enumerate() {
                lower[k] = lower[k].min(*c);
                upper[k] = upper[k].max(*c);
            }
        }
        for k in 0..dim {
            if upper[k] <= lower[k] {
                lower[k] -= 0.5;
                upper[k] += 0.5;
            }
        }
        DomainBox::new(lower, upper).expect("bounding box construction cannot fail")
    }
}

/// Partition of `[0, N)` into contiguous batches of size `b` (last may be
/// shorter).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    batch_size: usize,
    boundaries: Vec<Range<usize>>,
}

/// Splits a dataset of length `n` into batches of size `b`.
pub fn plan_batches(n: usize, b: usize) -> Result<BatchPlan> {
    if b < 1 || b > n {
        return Err(Error::InvalidInput(format!(
            "batch size must satisfy 1 <= b <= N, got b = {b}, N = {n}"
        )));
    }
    let boundaries = (0..n.div_ceil(b)).map(|k| (k * b)..((k + 1) * b).min(n)).collect();
    Ok(BatchPlan { batch_size: b, boundaries })
}

impl BatchPlan {
    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn num_batches(&self) -> usize {
        self.boundaries.len()
    }

    pub fn range(&self, batch: usize) -> Range<usize> {
        self.boundaries[batch].clone()
    }

    pub fn total_len(&self) -> usize {
        self.boundaries.last().map_or(0, |r| r.end)
    }

    /// Number of block tasks: `B (B + 1) / 2` over the upper triangle.
    pub fn task_count(&self) -> usize {
        let b = self.num_batches();
        b * (b + 1) / 2
    }

    /// Upper-triangular list of batch-pair tasks, row-major.
    pub fn tasks(&self) -> Vec<BlockTask> {
        let b = self.num_batches();
        (0..b)
            .flat_map(|i| (i..b).map(move |j| BlockTask { row_batch: i, col_batch: j }))
            .collect()
    }
}

/// One batch pair `(i, j)` with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockTask {
    pub row_batch: usize,
    pub col_batch: usize,
}

/// Dense covariance block for one batch pair, prior to sparsification.
#[derive(Debug, Clone)]
pub struct DenseBlock {
    pub row_batch_id: usize,
    pub col_batch_id: usize,
    rows: Range<usize>,
    cols: Range<usize>,
    /// Row-major `rows.len() x cols.len()` values. For diagonal blocks only
    /// the local upper triangle is populated.
    values: Vec<f64>,
}

impl DenseBlock {
    /// Casts to coordinate entries in global indices, dropping zeros and
    /// dust. Diagonal blocks emit only the upper triangle (including the
    /// diagonal); mirroring happens at insertion.
    pub fn sparsify(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let ncols = self.cols.len();
        let diagonal = self.row_batch_id == self.col_batch_id;
        let mut entries = Vec::new();
        for (lr, gr) in self.rows.clone().enumerate() {
            let start = if diagonal { lr } else { 0 };
            for lc in start..ncols {
                let v = self.values[lr * ncols + lc];
                if v.abs() >= threshold {
                    entries.push((gr, self.cols.start + lc, v));
                }
            }
        }
        entries
    }
}

/// Precomputed bump-sum values `f_i(x)` for a slice of points.
fn bump_value_table(spec: &SparsityKernelSpec, points: &[Point], range: Range<usize>) -> Result<Vec<Vec<f64>>> {
    range.map(|p| bump_values(spec, &points[p])).collect()
}

fn check_assembly_inputs(ds: &Dataset, plan: &BatchPlan, spec: &SparsityKernelSpec) -> Result<()> {
    if plan.total_len() != ds.len() {
        return Err(Error::InvalidInput(format!(
            "batch plan covers {} points but dataset has {}",
            plan.total_len(),
            ds.len()
        )));
    }
    if spec.dim() != ds.dim() {
        return Err(Error::DimensionMismatch { expected: ds.dim(), got: spec.dim() });
    }
    Ok(())
}

/// Computes the dense covariance block for one batch pair.
pub fn compute_dense_block(
    ds: &Dataset,
    task: BlockTask,
    plan: &BatchPlan,
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
) -> Result<DenseBlock> {
    check_assembly_inputs(ds, plan, spec)?;
    if task.row_batch > task.col_batch || task.col_batch >= plan.num_batches() {
        return Err(Error::InvalidInput(format!(
            "invalid block task ({}, {}) for {} batches",
            task.row_batch,
            task.col_batch,
            plan.num_batches()
        )));
    }
    let rows = plan.range(task.row_batch);
    let cols = plan.range(task.col_batch);
    let diagonal = task.row_batch == task.col_batch;
    let points = ds.points();
    let base_r = spec.base_radius();
    let base_r2 = base_r * base_r;

    let f_rows = bump_value_table(spec, points, rows.clone())?;
    let f_cols = if diagonal { Vec::new() } else { bump_value_table(spec, points, cols.clone())? };

    let ncols = cols.len();
    let mut values = vec![0.0; rows.len() * ncols];
    for (lr, gr) in rows.clone().enumerate() {
        let xr = points[gr].coords();
        let fr = &f_rows[lr];
        let start = if diagonal { lr } else { 0 };
        for lc in start..ncols {
            let gc = cols.start + lc;
            let d2 = sq_distance(xr, points[gc].coords());
            if d2 >= base_r2 {
                continue;
            }
            let fc = if diagonal { &f_rows[lc] } else { &f_cols[lc] };
            values[lr * ncols + lc] = pair_eval_d2(core, base_r, d2, fr, fc);
        }
    }
    Ok(DenseBlock {
        row_batch_id: task.row_batch,
        col_batch_id: task.col_batch,
        rows,
        cols,
        values,
    })
}

/// Computes one block and casts it to sparse coordinate entries.
pub fn compute_block(
    ds: &Dataset,
    task: BlockTask,
    plan: &BatchPlan,
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
) -> Result<Vec<(usize, usize, f64)>> {
    Ok(compute_dense_block(ds, task, plan, core, spec)?.sparsify(DUST_THRESHOLD))
}

/// Counters and timings from one covariance assembly.
#[derive(Debug, Clone)]
pub struct AssemblyStats {
    pub nnz: usize,
    /// `nnz / N^2`.
    pub empirical_s: f64,
    pub wall_time: f64,
    pub tasks_executed: usize,
    /// Per-task compute time in seconds, indexed like [`BatchPlan::tasks`].
    pub per_block_times: Vec<f64>,
}

impl AssemblyStats {
    pub fn mean_block_time(&self) -> f64 {
        if self.per_block_times.is_empty() {
            0.0
        } else {
            self.per_block_times.iter().sum::<f64>() / self.per_block_times.len() as f64
        }
    }
}

/// Assembles the full sparse host covariance (kernel part only; observation
/// noise is added by training). Blocks are computed by `workers` pool
/// threads and inserted by the calling thread, which acts as the collector.
pub fn assemble_covariance(
    ds: &Dataset,
    plan: &BatchPlan,
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
    workers: usize,
) -> Result<(SparseSymMatrix, AssemblyStats)> {
    if workers < 1 {
        return Err(Error::InvalidInput("need at least one worker".into()));
    }
    check_assembly_inputs(ds, plan, spec)?;

    let start = Instant::now();
    let tasks = plan.tasks();
    let next_task = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Result<Vec<(usize, usize, f64)>>, f64)>();

    let mut builder = SparseSymBuilder::new(ds.len())?;
    let mut per_block_times = vec![0.0; tasks.len()];

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let tasks = &tasks;
            let next_task = &next_task;
            scope.spawn(move || loop {
                let idx = next_task.fetch_add(1, Ordering::Relaxed);
                if idx >= tasks.len() {
                    break;
                }
                let t0 = Instant::now();
                let block = compute_block(ds, tasks[idx], plan, core, spec);
                let dt = t0.elapsed().as_secs_f64();
                if tx.send((idx, block, dt)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        // single collector: the only writer of the host matrix
        for _ in 0..tasks.len() {
            let (idx, block, dt) = rx
                .recv()
                .map_err(|_| Error::NumericalBreakdown("assembly worker pool died".into()))?;
            per_block_times[idx] = dt;
            for (i, j, v) in block? {
                builder.insert(i, j, v)?;
            }
        }
        Ok(())
    })?;

    let matrix = builder.finalize()?;
    let n = ds.len() as f64;
    let stats = AssemblyStats {
        nnz: matrix.nnz(),
        empirical_s: matrix.nnz() as f64 / (n * n),
        wall_time: start.elapsed().as_secs_f64(),
        tasks_executed: tasks.len(),
        per_block_times,
    };
    Ok((matrix, stats))
}

/// Rectangular sparse matrix stored by rows; used for query/data cross
/// covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRowMatrix {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        self.rows[i].is_empty()
    }

    /// Dot product of row `i` with a dense vector.
    pub fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        self.rows[i].iter().map(|&(j, x)| x * v[j]).sum()
    }

    /// Row `i` scattered into a dense vector of length `ncols`.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for &(j, x) in &self.rows[i] {
            out[j] = x;
        }
        out
    }
}

/// Cross covariance between query points (rows) and the dataset (columns),
/// with the same sparsification rule as block assembly.
pub fn cross_covariance(
    ds: &Dataset,
    queries: &[Point],
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
) -> Result<SparseRowMatrix> {
    if spec.dim() != ds.dim() {
        return Err(Error::DimensionMismatch { expected: ds.dim(), got: spec.dim() });
    }
    let base_r = spec.base_radius();
    let base_r2 = base_r * base_r;
    let f_data = bump_value_table(spec, ds.points(), 0..ds.len())?;

    let mut rows = Vec::with_capacity(queries.len());
    for q in queries {
        if q.dim() != ds.dim() {
            return Err(Error::DimensionMismatch { expected: ds.dim(), got: q.dim() });
        }
        let fq = bump_values(spec, q)?;
        let mut row = Vec::new();
        for (p, xp) in ds.points().iter().enumerate() {
            let d2 = sq_distance(q.coords(), xp.coords());
            if d2 >= base_r2 {
                continue;
            }
            let v = pair_eval_d2(core, base_r, d2, &fq, &f_data[p]);
            if v.abs() >= DUST_THRESHOLD {
                row.push((p, v));
            }
        }
        rows.push(row);
    }
    Ok(SparseRowMatrix { nrows: queries.len(), ncols: ds.len(), rows })
}

/// Inputs of the covariance-computation time model.
#[derive(Debug, Clone, Copy)]
pub struct ScalingModelInput {
    pub dataset_size: usize,
    pub batch_size: usize,
    pub workers: usize,
    /// Measured or assumed compute time for one block, seconds.
    pub block_time: f64,
}

/// Predicted covariance computation time.
///
/// With `exact`, `T = (D / (2 n b)) (D / b + 1) t_b`; otherwise the
/// large-`D/b` approximation `T = D^2 t_b / (2 n b^2)`.
pub fn scaling_model_time(input: &ScalingModelInput, exact: bool) -> f64 {
    let d = input.dataset_size as f64;
    let b = input.batch_size as f64;
    let n = input.workers as f64;
    let tb = input.block_time;
    if exact {
        d / (2.0 * n * b) * (d / b + 1.0) * tb
    } else {
        d * d * tb / (2.0 * n * b * b)
    }
}

/// One row of a scaling benchmark.
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub workers: usize,
    pub wall_time_s: f64,
    /// Mean per-block compute time observed in this run.
    pub mean_block_time_s: f64,
    /// Exact model prediction using the observed mean block time.
    pub model_time_s: f64,
}

/// Runs one assembly per worker count and records wall times alongside the
/// time-model prediction.
pub fn run_scaling_benchmark(
    ds: &Dataset,
    plan: &BatchPlan,
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
    worker_counts: &[usize],
) -> Result<Vec<ScalingRow>> {
    if worker_counts.is_empty() {
        return Err(Error::InvalidInput("need at least one worker count".into()));
    }
    let mut out = Vec::with_capacity(worker_counts.len());
    for &workers in worker_counts {
        let (_, stats) = assemble_covariance(ds, plan, core, spec, workers)?;
        let tb = stats.mean_block_time();
        let model = scaling_model_time(
            &ScalingModelInput {
                dataset_size: ds.len(),
                batch_size: plan.batch_size(),
                workers,
                block_time: tb,
            },
            true,
        );
        out.push(ScalingRow {
            workers,
            wall_time_s: stats.wall_time,
            mean_block_time_s: tb,
            model_time_s: model,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BumpParams;
    use approx::assert_abs_diff_eq;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn unit_bump(center: &[f64], r: f64) -> BumpParams {
        BumpParams::new(1.0, 1.0, r, pt(center)).unwrap()
    }

    fn line_dataset(n: usize, spacing: f64) -> Dataset {
        let points = (0..n).map(|i| pt(&[i as f64 * spacing])).collect();
        let y = (0..n).map(|i| (i as f64).sin()).collect();
        Dataset::new(points, y, None).unwrap()
    }

    #[test]
    fn plan_single_batch() {
        let plan = plan_batches(10, 10).unwrap();
        assert_eq!(plan.num_batches(), 1);
        assert_eq!(plan.task_count(), 1);
    }

    #[test]
    fn plan_uneven_batches() {
        let plan = plan_batches(10, 3).unwrap();
        assert_eq!(plan.num_batches(), 4);
        let sizes: Vec<usize> = (0..4).map(|i| plan.range(i).len()).collect();
        assert_eq!(sizes, vec![3, 3, 3, 1]);
        assert_eq!(plan.task_count(), 10);
        assert_eq!(plan.tasks().len(), 10);
    }

    #[test]
    fn plan_singleton() {
        let plan = plan_batches(1, 1).unwrap();
        assert_eq!(plan.num_batches(), 1);
        assert_eq!(plan.task_count(), 1);
    }

    #[test]
    fn plan_rejects_bad_batch_size() {
        assert!(plan_batches(10, 0).is_err());
        assert!(plan_batches(10, 11).is_err());
    }

    #[test]
    fn separated_batches_give_empty_block() {
        // two batches of points more than base_radius apart
        let points = vec![pt(&[0.0]), pt(&[0.1]), pt(&[5.0]), pt(&[5.1])];
        let ds = Dataset::new(points, vec![1.0; 4], None).unwrap();
        let plan = plan_batches(4, 2).unwrap();
        let spec =
            SparsityKernelSpec::new(vec![vec![unit_bump(&[0.0], 10.0)]], 1.0).unwrap();
        let entries = compute_block(
            &ds,
            BlockTask { row_batch: 0, col_batch: 1 },
            &plan,
            &CoreKernelSpec::None,
            &spec,
        )
        .unwrap();
        assert!(entries.is_empty());
    }

    #[test]
    fn diagonal_block_bump_center_value() {
        let ds = Dataset::new(vec![pt(&[0.5])], vec![1.0], None).unwrap();
        let plan = plan_batches(1, 1).unwrap();
        let spec = SparsityKernelSpec::new(vec![vec![unit_bump(&[0.5], 0.3)]], 1.0).unwrap();
        let entries = compute_block(
            &ds,
            BlockTask { row_batch: 0, col_batch: 0 },
            &plan,
            &CoreKernelSpec::None,
            &spec,
        )
        .unwrap();
        assert_eq!(entries.len(), 1);
        let (i, j, v) = entries[0];
        assert_eq!((i, j), (0, 0));
        assert_abs_diff_eq!(v, 0.26596152026762178, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_block_emits_upper_triangle_only() {
        let ds = line_dataset(5, 0.05);
        let plan = plan_batches(5, 5).unwrap();
        let spec = SparsityKernelSpec::new(vec![vec![unit_bump(&[0.1], 2.0)]], 1.0).unwrap();
        let entries = compute_block(
            &ds,
            BlockTask { row_batch: 0, col_batch: 0 },
            &plan,
            &CoreKernelSpec::None,
            &spec,
        )
        .unwrap();
        assert!(!entries.is_empty());
        assert!(entries.iter().all(|&(i, j, _)| i <= j));
    }

    #[test]
    fn block_matches_pairwise_oracle() {
        use crate::kernel::composed_kernel_eval;
        let ds = line_dataset(20, 0.07);
        let plan = plan_batches(20, 8).unwrap();
        let core = CoreKernelSpec::squared_exponential(1.5, 0.4).unwrap();
        let spec = SparsityKernelSpec::new(
            vec![
                vec![unit_bump(&[0.2], 0.3), unit_bump(&[0.9], 0.45)],
                vec![unit_bump(&[0.6], 0.25), unit_bump(&[1.2], 0.5)],
            ],
            0.8,
        )
        .unwrap();
        for task in plan.tasks() {
            let entries = compute_block(&ds, task, &plan, &core, &spec).unwrap();
            let mut seen = std::collections::HashMap::new();
            for (i, j, v) in entries {
                seen.insert((i, j), v);
            }
            for i in plan.range(task.row_batch) {
                for j in plan.range(task.col_batch) {
                    if task.row_batch == task.col_batch && j < i {
                        continue;
                    }
                    let direct =
                        composed_kernel_eval(&core, &spec, &ds.points()[i], &ds.points()[j])
                            .unwrap();
                    match seen.get(&(i, j)) {
                        Some(&v) => assert_eq!(v, direct, "({i},{j})"),
                        None => assert!(direct.abs() < DUST_THRESHOLD, "({i},{j}) missing {direct}"),
                    }
                }
            }
        }
    }

    #[test]
    fn single_point_assembly() {
        let ds = Dataset::new(vec![pt(&[0.0, 0.0])], vec![2.0], None).unwrap();
        let plan = plan_batches(1, 1).unwrap();
        let spec = SparsityKernelSpec::new(vec![vec![unit_bump(&[0.0, 0.0], 1.0)]], 1.0).unwrap();
        let (m, stats) = assemble_covariance(&ds, &plan, &CoreKernelSpec::None, &spec, 1).unwrap();
        assert_eq!(m.order(), 1);
        assert_eq!(stats.tasks_executed, 1);
        assert_abs_diff_eq!(m.get(0, 0), 0.26596152026762178, epsilon = 1e-15);
    }

    #[test]
    fn task_coverage_counts() {
        let ds = line_dataset(25, 0.1);
        let plan = plan_batches(25, 7).unwrap();
        let spec = SparsityKernelSpec::new(vec![vec![unit_bump(&[1.0], 0.8)]], 0.9).unwrap();
        let (_, stats) = assemble_covariance(&ds, &plan, &CoreKernelSpec::None, &spec, 3).unwrap();
        let b = plan.num_batches();
        assert_eq!(stats.tasks_executed, b * (b + 1) / 2);
        assert_eq!(stats.per_block_times.len(), stats.tasks_executed);
    }

    #[test]
    fn cross_covariance_rows() {
        let ds = line_dataset(10, 0.1);
        let spec = SparsityKernelSpec::new(vec![vec![unit_bump(&[0.4], 0.5)]], 0.6).unwrap();
        let core = CoreKernelSpec::None;
        let kappa = cross_covariance(&ds, &[pt(&[50.0]), pt(&[0.4])], &core, &spec).unwrap();
        // far query: all-zero row
        assert!(kappa.row_is_empty(0));
        // query at a data point: entry equals k(x_p, x_p)
        let p = 4; // x = 0.4
        let direct =
            crate::kernel::composed_kernel_eval(&core, &spec, &ds.points()[p], &ds.points()[p])
                .unwrap();
        let entry = kappa.row(1).iter().find(|(j, _)| *j == p).unwrap().1;
        assert_eq!(entry, direct);
    }

    #[test]
    fn scaling_model_examples() {
        // D = 10000, b = 1000, n = 10, t_b = 1
        let input = ScalingModelInput {
            dataset_size: 10000,
            batch_size: 1000,
            workers: 10,
            block_time: 1.0,
        };
        assert_abs_diff_eq!(scaling_model_time(&input, true), 5.5, epsilon = 1e-12);
        assert_abs_diff_eq!(scaling_model_time(&input, false), 5.0, epsilon = 1e-12);
        // one worker per batch: D = 100, b = 10, n = 10, t_b = 2
        let input = ScalingModelInput {
            dataset_size: 100,
            batch_size: 10,
            workers: 10,
            block_time: 2.0,
        };
        assert_abs_diff_eq!(scaling_model_time(&input, true), 11.0, epsilon = 1e-12);
    }

    #[test]
    fn benchmark_single_count() {
        let ds = line_dataset(50, 0.05);
        let plan = plan_batches(50, 20).unwrap();
        let spec = SparsityKernelSpec::new(vec![vec![unit_bump(&[1.0], 1.0)]], 1.0).unwrap();
        let rows =
            run_scaling_benchmark(&ds, &plan, &CoreKernelSpec::None, &spec, &[1]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].wall_time_s > 0.0);
        assert!(rows[0].model_time_s >= 0.0);
    }
}
