//! Sparse symmetric matrices and the solver primitives GP training needs:
//! conjugate-gradient linear solves and randomized log-determinant
//! estimation. Cholesky and LU factorizations are deliberately absent; their
//! fill-in makes them unsuitable for the covariance matrices produced here.

mod cg;
mod logdet;
mod market;
mod matrix;

pub use cg::{cg_solve, CGConfig, CgSolution, Preconditioner};
pub use logdet::{logdet_rla, LogDetConfig, LogDetEstimate};
pub use market::{read_matrix_market, write_matrix_market};
pub use matrix::{SparseSymBuilder, SparseSymMatrix};
