//! The central claim of the assembly pipeline: batching, sparsification and
//! parallel collection introduce no approximation whatsoever. Assembled
//! matrices equal the brute-force dense Gram matrix bit-for-bit (up to the
//! documented dust threshold), independent of worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_gp::{
    assemble_covariance, composed_kernel_eval, cross_covariance, plan_batches,
    sparsity_upper_bound, BumpParams, CoreKernelSpec, Dataset, DomainBox, Point,
    SparsityKernelSpec, DUST_THRESHOLD,
};

fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).unwrap()
}

fn random_points(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    (0..n)
        .map(|_| pt(&(0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>()))
        .collect()
}

fn random_spec(dim: usize, rng: &mut ChaCha8Rng) -> SparsityKernelSpec {
    let n1 = rng.random_range(1..=3);
    let n2 = rng.random_range(1..=3);
    let sums = (0..n1)
        .map(|_| {
            (0..n2)
                .map(|_| {
                    BumpParams::new(
                        0.2 + 1.5 * rng.random::<f64>(),
                        0.2 + 2.0 * rng.random::<f64>(),
                        0.05 + 0.2 * rng.random::<f64>(),
                        pt(&(0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>()),
                    )
                    .unwrap()
                })
                .collect()
        })
        .collect();
    SparsityKernelSpec::new(sums, 0.15 + 0.4 * rng.random::<f64>()).unwrap()
}

/// Brute-force double loop with the same public kernel evaluator.
fn dense_gram(
    points: &[Point],
    core: &CoreKernelSpec,
    spec: &SparsityKernelSpec,
) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = composed_kernel_eval(core, spec, &points[i], &points[j]).unwrap();
        }
    }
    g
}

#[test]
fn assembled_matrix_equals_dense_gram_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let n = 200;
    let points = random_points(n, 2, &mut rng);
    let y = vec![0.0; n];
    let ds = Dataset::new(points.clone(), y, None).unwrap();
    let core = CoreKernelSpec::squared_exponential(1.2, 0.3).unwrap();
    let spec = random_spec(2, &mut rng);
    let plan = plan_batches(n, 37).unwrap();

    let (matrix, stats) = assemble_covariance(&ds, &plan, &core, &spec, 3).unwrap();
    let dense = dense_gram(&points, &core, &spec);

    let mut nnz_dense = 0;
    for i in 0..n {
        for j in 0..n {
            let d = dense[i][j];
            if d.abs() >= DUST_THRESHOLD {
                nnz_dense += 1;
                assert_eq!(matrix.get(i, j), d, "entry ({i}, {j})");
            } else {
                assert_eq!(matrix.get(i, j), 0.0, "dust entry ({i}, {j})");
            }
        }
    }
    assert_eq!(stats.nnz, nnz_dense);
    assert!((stats.empirical_s - nnz_dense as f64 / (n as f64 * n as f64)).abs() < 1e-15);
}

#[test]
fn assembly_is_deterministic_across_worker_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let n = 150;
    let points = random_points(n, 2, &mut rng);
    let ds = Dataset::new(points, vec![1.0; n], None).unwrap();
    let spec = random_spec(2, &mut rng);
    let core = CoreKernelSpec::None;
    let plan = plan_batches(n, 31).unwrap();

    let (reference, _) = assemble_covariance(&ds, &plan, &core, &spec, 1).unwrap();
    for workers in [2usize, 5, 9] {
        let (m, stats) = assemble_covariance(&ds, &plan, &core, &spec, workers).unwrap();
        assert_eq!(m, reference, "workers = {workers}");
        assert_eq!(stats.nnz, reference.nnz());
    }
}

#[test]
fn separated_clusters_give_block_diagonal_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    // two clusters of 50 in [0, 0.2]^2 and [0.8, 1.0]^2: all cross-cluster
    // distances exceed the base radius 0.5
    let mut points = Vec::new();
    for _ in 0..50 {
        points.push(pt(&[0.2 * rng.random::<f64>(), 0.2 * rng.random::<f64>()]));
    }
    for _ in 0..50 {
        points.push(pt(&[0.8 + 0.2 * rng.random::<f64>(), 0.8 + 0.2 * rng.random::<f64>()]));
    }
    let ds = Dataset::new(points.clone(), vec![0.5; 100], None).unwrap();
    let spec = SparsityKernelSpec::new(
        vec![vec![
            BumpParams::new(1.0, 1.0, 0.3, pt(&[0.1, 0.1])).unwrap(),
            BumpParams::new(1.0, 1.0, 0.3, pt(&[0.9, 0.9])).unwrap(),
        ]],
        0.5,
    )
    .unwrap();
    let plan = plan_batches(100, 16).unwrap();
    let (matrix, stats) =
        assemble_covariance(&ds, &plan, &CoreKernelSpec::None, &spec, 2).unwrap();

    // off-diagonal blocks are empty
    for i in 0..50 {
        for j in 50..100 {
            assert_eq!(matrix.get(i, j), 0.0);
        }
    }
    assert!(stats.empirical_s <= 0.5);
    // dense oracle agrees that the pattern is block-diagonal
    let dense = dense_gram(&points, &CoreKernelSpec::None, &spec);
    for (i, row) in dense.iter().enumerate().take(50) {
        for (j, v) in row.iter().enumerate().skip(50) {
            assert_eq!(*v, 0.0, "oracle ({i}, {j})");
        }
    }
}

#[test]
fn empirical_sparsity_below_analytic_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    let domain = DomainBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let n = 2000;
    for case in 0..4 {
        let points = random_points(n, 2, &mut rng);
        let ds = Dataset::new(points, vec![0.0; n], None).unwrap();
        let spec = random_spec(2, &mut rng);
        let bound = sparsity_upper_bound(&spec, &domain).unwrap();
        let plan = plan_batches(n, 500).unwrap();
        let (_, stats) = assemble_covariance(&ds, &plan, &CoreKernelSpec::None, &spec, 2).unwrap();
        assert!(
            stats.empirical_s <= bound.min(1.0) + 0.05,
            "case {case}: empirical {} vs bound {}",
            stats.empirical_s,
            bound
        );
    }
}

#[test]
fn cross_covariance_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    let points = random_points(50, 2, &mut rng);
    let ds = Dataset::new(points.clone(), vec![0.0; 50], None).unwrap();
    let core = CoreKernelSpec::squared_exponential(0.9, 0.5).unwrap();
    let spec = random_spec(2, &mut rng);
    let queries = random_points(5, 2, &mut rng);

    let kappa = cross_covariance(&ds, &queries, &core, &spec).unwrap();
    for (qi, q) in queries.iter().enumerate() {
        for (p, x) in points.iter().enumerate() {
            let direct = composed_kernel_eval(&core, &spec, q, x).unwrap();
            let stored = kappa.row(qi).iter().find(|(j, _)| *j == p).map(|(_, v)| *v);
            if direct.abs() >= DUST_THRESHOLD {
                assert_eq!(stored, Some(direct), "query {qi} point {p}");
            } else {
                assert_eq!(stored, None, "query {qi} point {p}");
            }
        }
    }
}

#[test]
fn sampled_gram_matrices_are_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    for trial in 0..20 {
        let points = random_points(30, 2, &mut rng);
        let spec = random_spec(2, &mut rng);
        let core = if trial % 2 == 0 {
            CoreKernelSpec::None
        } else {
            CoreKernelSpec::squared_exponential(1.0 + rng.random::<f64>(), 0.2 + rng.random::<f64>()).unwrap()
        };
        let mut gram = dense_gram(&points, &core, &spec);
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] += 1e-10;
        }
        let eigenvalues = denseref::sym_eigenvalues(&gram);
        let min = eigenvalues.first().copied().unwrap();
        assert!(min >= -1e-8, "trial {trial}: min eigenvalue {min}");
    }
}
