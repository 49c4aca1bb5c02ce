use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;

/// LU factorization with partial (row) pivoting.
///
/// A pivot is declared singular when its modulus falls at or below
/// `n * eps * maxabs(input)`, which keeps the threshold scale-free.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

pub fn lu_factor(a: &ComplexMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let tol = n as f64 * f64::EPSILON * a.norm_max();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[(col, col)].norm();
        for r in (col + 1)..n {
            let mag = lu[(r, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= tol {
            return Err(Error::SingularMatrix { pivot_index: col });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(col, pivot_row);
        }
        let pivot = lu[(col, col)];
        for r in (col + 1)..n {
            let mult = lu[(r, col)] / pivot;
            lu[(r, col)] = mult;
            for j in (col + 1)..n {
                let upd = lu[(r, j)] - mult * lu[(col, j)];
                lu[(r, j)] = upd;
            }
        }
    }

    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn dimension(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = rhs` for a multi-column right-hand side.
    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dimension();
        if rhs.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "lu_solve",
                lhs_rows: n,
                lhs_cols: n,
                rhs_rows: rhs.rows(),
                rhs_cols: rhs.cols(),
            });
        }
        let cols = rhs.cols();
        let mut x = ComplexMatrix::zeros(n, cols);

        for c in 0..cols {
            // forward substitution on the permuted rhs
            let mut y = vec![Complex64::ZERO; n];
            for r in 0..n {
                let mut v = rhs[(self.perm[r], c)];
                for (k, yk) in y.iter().enumerate().take(r) {
                    v -= self.lu[(r, k)] * yk;
                }
                y[r] = v;
            }
            // back substitution
            for r in (0..n).rev() {
                let mut v = y[r];
                for k in (r + 1)..n {
                    v -= self.lu[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = v / self.lu[(r, r)];
            }
        }
        Ok(x)
    }
}

/// One-shot solve of `a x = rhs`.
pub fn lu_solve(a: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    lu_factor(a)?.solve(rhs)
}

/// Dense inverse via LU; used only where the inverse itself is the product.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let f = lu_factor(a)?;
    f.solve(&ComplexMatrix::identity(a.rows()))
}
