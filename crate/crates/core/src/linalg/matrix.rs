use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix in row-major order, the universal computational
/// carrier for this crate.
///
/// Values are immutable in spirit: every operation returns a fresh matrix,
/// and mutation is only used while one is being filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from a row-major entry list, rejecting length
    /// mismatches and non-finite values.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_entries",
                lhs_rows: rows,
                lhs_cols: cols,
                rhs_rows: entries.len(),
                rhs_cols: 1,
            });
        }
        for (idx, e) in entries.iter().enumerate() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(data: &[Vec<Complex64>]) -> Self {
        assert!(!data.is_empty());
        let cols = data[0].len();
        let mut m = Self::zeros(data.len(), cols);
        for (i, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Column vector of ones.
    pub fn ones_col(n: usize) -> Self {
        Self::from_fn(n, 1, |_, _| Complex64::ONE)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Checked matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: other.rows,
                rhs_cols: other.cols,
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                let lhs = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out.entries[dst + j] += a * other.entries[lhs + j];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product: block (i, k) of the result is `self[i, k] * other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for r in 0..other.rows {
                    for c in 0..other.cols {
                        out[(i * other.rows + r, k * other.cols + c)] = a * other[(r, c)];
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> ComplexMatrix {
        self.map(|e| e.conj())
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        self.map(|e| c * e)
    }

    /// Max entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Copy of the `rows x cols` block whose top-left corner is (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(
            row + rows <= self.rows && col + cols <= self.cols,
            "block out of range"
        );
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }

    /// Overwrites the block at (`row`, `col`) with `m`.
    pub fn set_block(&mut self, row: usize, col: usize, m: &ComplexMatrix) {
        assert!(
            row + m.rows <= self.rows && col + m.cols <= self.cols,
            "block out of range"
        );
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(row + i, col + j)] = m[(i, j)];
            }
        }
    }

    /// Horizontal concatenation. All parts must share a row count.
    pub fn hstack(parts: &[&ComplexMatrix]) -> ComplexMatrix {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = ComplexMatrix::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, at, p);
            at += p.cols;
        }
        out
    }

    /// Vertical concatenation. All parts must share a column count.
    pub fn vstack(parts: &[&ComplexMatrix]) -> ComplexMatrix {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = ComplexMatrix::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack col mismatch");
            out.set_block(at, 0, p);
            at += p.rows;
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.entries[i * self.cols + j]
    }
}

// Operators panic on shape mismatch; use `matmul` when the shapes come from
// outside the crate.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
            .expect("operator * on non-conformable matrices")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|e| -e)
    }
}

// owned-lhs variants so products and sums chain naturally
impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &self * rhs
    }
}

impl Add<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &self + rhs
    }
}

impl Sub<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &self - rhs
    }
}

/// Max entry modulus of the difference; shapes must match.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "diff shape mismatch");
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max_abs_diff` scaled by `max(reference max-norm, 1)`.
pub fn rel_residual(value: &ComplexMatrix, reference: &ComplexMatrix) -> f64 {
    max_abs_diff(value, reference) / reference.norm_max().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Complex64 {
        Complex64::I
    }

    /// Independent triple-loop product used as the oracle for `matmul`.
    fn matmul_naive(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows(), b.cols());
        for r in 0..a.rows() {
            for c in 0..b.cols() {
                let mut acc = Complex64::ZERO;
                for k in 0..a.cols() {
                    acc += a[(r, k)] * b[(k, c)];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    fn pseudo_random(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = crate::rng::XorShift64Star::new(seed);
        ComplexMatrix::from_fn(rows, cols, |_, _| cplx(rng.next_unit(), rng.next_unit()))
    }

    #[test]
    fn matmul_identity_passthrough() {
        let x = pseudo_random(2, 2, 7);
        let got = ComplexMatrix::identity(2).matmul(&x).unwrap();
        assert_eq!(got, x);
    }

    #[test]
    fn matmul_i_squared() {
        let m = ComplexMatrix::from_rows(&[vec![i()]]);
        let got = m.matmul(&m).unwrap();
        assert_eq!(got[(0, 0)], cplx(-1.0, 0.0));
    }

    #[test]
    fn matmul_matches_triple_loop_oracle() {
        let a = pseudo_random(3, 4, 11);
        let b = pseudo_random(4, 2, 12);
        let got = a.matmul(&b).unwrap();
        let want = matmul_naive(&a, &b);
        assert!(max_abs_diff(&got, &want) <= 1e-14);
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        let err = a.matmul(&b).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                op: "matmul",
                lhs_rows: 2,
                lhs_cols: 3,
                rhs_rows: 2,
                rhs_cols: 3
            }
        );
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(i2.kron(&i3), ComplexMatrix::identity(6));

        let two = ComplexMatrix::from_rows(&[vec![cplx(2.0, 0.0)]]);
        let b = pseudo_random(3, 2, 5);
        assert_eq!(two.kron(&b), b.scale(cplx(2.0, 0.0)));
    }

    #[test]
    fn kron_mixed_product() {
        for seed in 0..8 {
            let a = pseudo_random(2, 2, 100 + seed);
            let b = pseudo_random(2, 2, 200 + seed);
            let c = pseudo_random(2, 2, 300 + seed);
            let d = pseudo_random(2, 2, 400 + seed);
            let lhs = a.kron(&b).matmul(&c.kron(&d)).unwrap();
            let rhs = a.matmul(&c).unwrap().kron(&b.matmul(&d).unwrap());
            assert!(rel_residual(&lhs, &rhs) <= 1e-13);
        }
    }

    #[test]
    fn conj_transpose_of_i() {
        let m = ComplexMatrix::from_rows(&[vec![i()]]);
        assert_eq!(m.conj_transpose()[(0, 0)], cplx(0.0, -1.0));
    }

    #[test]
    fn transpose_involution_exact() {
        let a = pseudo_random(4, 3, 9);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.conj_transpose().conj_transpose(), a);
    }

    #[test]
    fn norm_max_of_zero() {
        assert_eq!(ComplexMatrix::zeros(3, 3).norm_max(), 0.0);
    }

    #[test]
    fn from_entries_rejects_non_finite() {
        let err = ComplexMatrix::from_entries(1, 2, vec![Complex64::ONE, cplx(f64::NAN, 0.0)]);
        assert_eq!(err.unwrap_err(), Error::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn stacking_round_trip() {
        let a = pseudo_random(2, 3, 21);
        let b = pseudo_random(2, 2, 22);
        let h = ComplexMatrix::hstack(&[&a, &b]);
        assert_eq!(h.block(0, 0, 2, 3), a);
        assert_eq!(h.block(0, 3, 2, 2), b);

        let c = pseudo_random(1, 3, 23);
        let v = ComplexMatrix::vstack(&[&a, &c]);
        assert_eq!(v.block(2, 0, 1, 3), c);
    }

    #[test]
    fn matrices_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ComplexMatrix>();
    }
}
