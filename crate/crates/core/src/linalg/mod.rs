//! Dense complex linear algebra kernel: arithmetic, Kronecker products,
//! LU factorization and solves, norms.

mod lu;
mod matrix;

pub use lu::{inverse, lu_factor, lu_solve, LuFactors};
pub use matrix::{cplx, max_abs_diff, rel_residual, ComplexMatrix};
