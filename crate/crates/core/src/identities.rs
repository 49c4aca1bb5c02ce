//! Displacement operators, their structured resolvents, the low-rank
//! coupling factors of the structure identities, and residual checks for
//! every identity the library relies on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cplx, inverse, max_abs_diff, ComplexMatrix};
use crate::structured::{BlockTbtSpec, DimTriple, StructureClass};

/// Lower-triangular Toeplitz core: i/2 on the diagonal, i strictly below.
/// Its spectrum is the single point i/2.
pub fn displacement_core(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            cplx(0.0, 0.5)
        } else if i > j {
            cplx(0.0, 1.0)
        } else {
            Complex64::ZERO
        }
    })
}

/// Dense m x m displacement operator for level p: the core acting on the
/// p-th Kronecker slot, identity on the others.
pub fn displacement_op(dims: DimTriple, p: usize) -> Result<ComplexMatrix> {
    let core = displacement_core(dims.level(p)?);
    let (left, right) = kron_flanks(dims, p)?;
    Ok(ComplexMatrix::identity(left)
        .kron(&core)
        .kron(&ComplexMatrix::identity(right)))
}

/// Identity sizes flanking the level-p slot in I_left (x) S (x) I_right.
fn kron_flanks(dims: DimTriple, p: usize) -> Result<(usize, usize)> {
    match p {
        1 => Ok((1, dims.m2() * dims.m3())),
        2 => Ok((dims.m1(), dims.m3())),
        3 => Ok((dims.m1() * dims.m2(), 1)),
        _ => Err(Error::BadAxis { p }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventKind {
    /// (A_p - z I)^'t
    Standard,
    /// (A_p^* - z I)^'t
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Applies (I_a (x) S (x) I_b) to `x` on the left.
fn kron_mid_apply_left(s: &ComplexMatrix, a: usize, b: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let n = s.rows();
    assert_eq!(x.rows(), a * n * b, "operand height mismatch");
    let cols = x.cols();
    let mut y = ComplexMatrix::zeros(x.rows(), cols);
    for alpha in 0..a {
        for j in 0..n {
            for jp in 0..n {
                let w = s[(j, jp)];
                if w == Complex64::ZERO {
                    continue;
                }
                for beta in 0..b {
                    let dst = (alpha * n + j) * b + beta;
                    let src = (alpha * n + jp) * b + beta;
                    for c in 0..cols {
                        y[(dst, c)] += w * x[(src, c)];
                    }
                }
            }
        }
    }
    y
}

/// Applies (I_a (x) S (x) I_b) to `x` on the right.
fn kron_mid_apply_right(x: &ComplexMatrix, s: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    let n = s.rows();
    assert_eq!(x.cols(), a * n * b, "operand width mismatch");
    let rows = x.rows();
    let mut y = ComplexMatrix::zeros(rows, x.cols());
    for alpha in 0..a {
        for j in 0..n {
            for jp in 0..n {
                let w = s[(jp, j)];
                if w == Complex64::ZERO {
                    continue;
                }
                for beta in 0..b {
                    let dst = (alpha * n + j) * b + beta;
                    let src = (alpha * n + jp) * b + beta;
                    for r in 0..rows {
                        y[(r, dst)] += x[(r, src)] * w;
                    }
                }
            }
        }
    }
    y
}

const POLE_GUARD: f64 = 1e-12;

/// Applies the resolvent of the level-p displacement operator (or of its
/// conjugate transpose) to `x`, working only with the small level core;
/// the m x m resolvent is never formed.
pub fn resolvent_apply(
    dims: DimTriple,
    p: usize,
    z: Complex64,
    kind: ResolventKind,
    side: Side,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let pole = match kind {
        ResolventKind::Standard => cplx(0.0, 0.5),
        ResolventKind::Adjoint => cplx(0.0, -0.5),
    };
    if (z - pole).norm() <= POLE_GUARD {
        return Err(Error::PoleAtSpectrum { z });
    }
    let n = dims.level(p)?;
    let core = match kind {
        ResolventKind::Standard => displacement_core(n),
        ResolventKind::Adjoint => displacement_core(n).conj_transpose(),
    };
    let shifted = &core - &ComplexMatrix::identity(n).scale(z);
    let small = inverse(&shifted)?;
    let (a, b) = kron_flanks(dims, p)?;
    Ok(match side {
        Side::Left => kron_mid_apply_left(&small, a, b, x),
        Side::Right => kron_mid_apply_right(x, &small, a, b),
    })
}

/// Closed-form row [1 .. 1] (core^* - z I)^'t: the constant -2/(2z+i)
/// times the geometric row in (2z-i)/(2z+i).
pub fn ones_row_resolvent(n: usize, z: Complex64) -> Result<ComplexMatrix> {
    let denom = 2.0 * z + Complex64::I;
    if denom.norm() <= 2.0 * POLE_GUARD {
        return Err(Error::PoleAtSpectrum { z });
    }
    let scale = -2.0 / denom;
    let ratio = (2.0 * z - Complex64::I) / denom;
    let mut row = ComplexMatrix::zeros(1, n);
    let mut pow = Complex64::ONE;
    for k in 0..n {
        row[(0, k)] = scale * pow;
        pow *= ratio;
    }
    Ok(row)
}

/// Block-diagonal pairing diag((core_p^* - z I) (x) I_m3,
/// (core_p - z I) (x) I_m3) of order 2 m_p m3. It is invertible exactly
/// when z avoids both spectrum points +-i/2; the off-diagonal blocks of
/// the recovery systems are conjugated through it.
pub fn mixed_core_pair(dims: DimTriple, p: usize, z: Complex64) -> Result<ComplexMatrix> {
    let n = dims.level(p)?;
    let core = displacement_core(n);
    let shift = ComplexMatrix::identity(n).scale(z);
    let eye3 = ComplexMatrix::identity(dims.m3());
    let adj = (&core.conj_transpose() - &shift).kron(&eye3);
    let std = (&core - &shift).kron(&eye3);
    let half = adj.rows();
    let mut out = ComplexMatrix::zeros(2 * half, 2 * half);
    out.set_block(0, 0, &adj);
    out.set_block(half, half, &std);
    Ok(out)
}

/// Column (core - z I)^'t [1 .. 1], the standard-side counterpart of
/// `ones_row_resolvent`, computed by a small solve.
pub fn ones_col_resolvent(n: usize, z: Complex64) -> Result<ComplexMatrix> {
    if (z - cplx(0.0, 0.5)).norm() <= POLE_GUARD {
        return Err(Error::PoleAtSpectrum { z });
    }
    let shifted = &displacement_core(n) - &ComplexMatrix::identity(n).scale(z);
    crate::linalg::lu_solve(&shifted, &ComplexMatrix::ones_col(n))
}

/// Column of m_p ones Kronecker the inner identity: the level-p summation
/// map (m_p * m3) x m3.
pub fn level_sum(dims: DimTriple, p: usize) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::ones_col(dims.level(p)?).kron(&ComplexMatrix::identity(dims.m3())))
}

/// Full summation map m x m3: a column of m1*m2 inner identities.
pub fn full_sum(dims: DimTriple) -> ComplexMatrix {
    ComplexMatrix::ones_col(dims.m1() * dims.m2()).kron(&ComplexMatrix::identity(dims.m3()))
}

/// The four low-rank factors of one structure identity, plus their
/// concatenations.
#[derive(Debug, Clone)]
pub struct IdentityFactors {
    pub m1: ComplexMatrix,
    pub m2: ComplexMatrix,
    pub m3: ComplexMatrix,
    pub m4: ComplexMatrix,
    /// [m1 m3]
    pub pi: ComplexMatrix,
    /// col[m2; m4]
    pub pi_hat: ComplexMatrix,
}

impl IdentityFactors {
    fn new(m1: ComplexMatrix, m2: ComplexMatrix, m3: ComplexMatrix, m4: ComplexMatrix) -> Self {
        let pi = ComplexMatrix::hstack(&[&m1, &m3]);
        let pi_hat = ComplexMatrix::vstack(&[&m2, &m4]);
        IdentityFactors {
            m1,
            m2,
            m3,
            m4,
            pi,
            pi_hat,
        }
    }
}

/// Everything derived from a spec that the identities and the recovery
/// pipeline consume: displacement cores and operators, the coupling factors
/// for each identity (the third identity only for 3-D specs), the constant
/// coupling rows/columns, and the summation maps.
#[derive(Debug, Clone)]
pub struct CouplingSet {
    dims: DimTriple,
    class: StructureClass,
    cores: [ComplexMatrix; 3],
    ops: [ComplexMatrix; 3],
    factors: [IdentityFactors; 2],
    third: Option<IdentityFactors>,
    /// Coupling blocks tied to the fourth/first factor identities.
    pub k1: [ComplexMatrix; 2],
    /// Constant m3 x m row shared by both identities.
    pub k_row: ComplexMatrix,
    /// Constant m x m3 column, the adjoint-side analog of `k_row`.
    pub n_col: ComplexMatrix,
    /// Full summation map.
    pub l: ComplexMatrix,
    /// Level summation maps for p = 1, 2.
    pub lp: [ComplexMatrix; 2],
}

impl CouplingSet {
    pub fn build(spec: &BlockTbtSpec) -> Self {
        let dims = spec.dims();
        let (m1, m2, m3) = (dims.m1(), dims.m2(), dims.m3());
        let half = cplx(0.5, 0.0);
        let eye3 = ComplexMatrix::identity(m3);
        let eye23 = ComplexMatrix::identity(m2 * m3);
        let ones_row = |n: usize| ComplexMatrix::ones_col(n).transpose();

        // first identity factors
        let running_outer = |down: bool| -> Vec<ComplexMatrix> {
            // partial sums half*T_0 + sum of T_{+-s}, one entry per level index
            let mut acc = spec.outer_block(0).scale(half);
            let mut blocks = vec![acc.clone()];
            for s in 1..m1 as i64 {
                acc = &acc + &spec.outer_block(if down { -s } else { s });
                blocks.push(acc.clone());
            }
            blocks
        };
        let up = running_outer(false);
        let m11 = ComplexMatrix::vstack(&up.iter().collect::<Vec<_>>());
        let down = running_outer(true);
        let m41 = ComplexMatrix::hstack(&down.iter().collect::<Vec<_>>());
        let m21 = ones_row(m1).kron(&eye23);
        let m31 = m21.conj_transpose();
        let f1 = IdentityFactors::new(m11, m21, m31, m41);

        // second identity factors; the per-diagonal blocks also feed the
        // constant coupling rows/columns below
        let r_range = -(m1 as i64 - 1)..=(m1 as i64 - 1);
        let mut m12_blocks = Vec::new(); // m2*m3 x m3, indexed r + m1-1
        let mut m42_blocks = Vec::new(); // m3 x m2*m3
        for r in r_range.clone() {
            let mut acc = spec.coeff(r, 0).scale(half);
            let mut col_parts = vec![acc.clone()];
            for j in 1..m2 as i64 {
                acc = &acc + spec.coeff(r, j);
                col_parts.push(acc.clone());
            }
            m12_blocks.push(ComplexMatrix::vstack(&col_parts.iter().collect::<Vec<_>>()));

            let mut acc = spec.coeff(r, 0).scale(half);
            let mut row_parts = vec![acc.clone()];
            for l in 1..m2 as i64 {
                acc = &acc + spec.coeff(r, -l);
                row_parts.push(acc.clone());
            }
            m42_blocks.push(ComplexMatrix::hstack(&row_parts.iter().collect::<Vec<_>>()));
        }
        let block_at =
            |blocks: &[ComplexMatrix], r: i64| blocks[(r + m1 as i64 - 1) as usize].clone();
        let block_toeplitz = |blocks: &[ComplexMatrix], order: usize| {
            let (bh, bw) = (blocks[0].rows(), blocks[0].cols());
            let mut out = ComplexMatrix::zeros(order * bh, order * bw);
            for i in 0..order {
                for k in 0..order {
                    out.set_block(
                        i * bh,
                        k * bw,
                        &blocks[(i as i64 - k as i64 + m1 as i64 - 1) as usize],
                    );
                }
            }
            out
        };
        let m12 = block_toeplitz(&m12_blocks, m1);
        let m42 = block_toeplitz(&m42_blocks, m1);
        let m22 = ComplexMatrix::identity(m1).kron(&ones_row(m2)).kron(&eye3);
        let m32 = m22.conj_transpose();
        let f2 = IdentityFactors::new(m12, m22, m32, m42);

        // running-sum concatenations of the per-diagonal blocks
        let running_concat = |blocks: &[ComplexMatrix], step: i64, vertical: bool| {
            let mut acc = block_at(blocks, 0).scale(half);
            let mut parts = vec![acc.clone()];
            for j in 1..m1 as i64 {
                acc = &acc + &block_at(blocks, step * j);
                parts.push(acc.clone());
            }
            let refs: Vec<&ComplexMatrix> = parts.iter().collect();
            if vertical {
                ComplexMatrix::vstack(&refs)
            } else {
                ComplexMatrix::hstack(&refs)
            }
        };
        let k11 = running_concat(&m42_blocks, 1, true);
        let k12 = running_concat(&m12_blocks, -1, false);
        let k_row = running_concat(&m42_blocks, -1, false);
        let n_col = running_concat(&m12_blocks, 1, true);

        // third identity factors exist only when the inner blocks are scalar
        // Toeplitz, i.e. for 3-D specs
        let third = if spec.class() == StructureClass::Toeplitz3d {
            let tau = |r: i64, s: i64, j: i64| {
                let block = spec.coeff(r, s);
                if j >= 0 {
                    block[(j as usize, 0)]
                } else {
                    block[(0, (-j) as usize)]
                }
            };
            let scalar_runs = |r: i64, s: i64, sign: i64, as_col: bool| {
                let mut acc = tau(r, s, 0) * half;
                let mut vals = vec![acc];
                for j in 1..m3 as i64 {
                    acc += tau(r, s, sign * j);
                    vals.push(acc);
                }
                if as_col {
                    ComplexMatrix::from_fn(m3, 1, |i, _| vals[i])
                } else {
                    ComplexMatrix::from_fn(1, m3, |_, k| vals[k])
                }
            };
            let two_level_toeplitz = |sign: i64, as_col: bool| {
                let (bh, bw) = if as_col { (m3, 1) } else { (1, m3) };
                let mut out = ComplexMatrix::zeros(m1 * m2 * bh, m1 * m2 * bw);
                for i in 0..m1 {
                    for k in 0..m1 {
                        for ii in 0..m2 {
                            for kk in 0..m2 {
                                out.set_block(
                                    (i * m2 + ii) * bh,
                                    (k * m2 + kk) * bw,
                                    &scalar_runs(
                                        i as i64 - k as i64,
                                        ii as i64 - kk as i64,
                                        sign,
                                        as_col,
                                    ),
                                );
                            }
                        }
                    }
                }
                out
            };
            let m13 = two_level_toeplitz(1, true);
            let m43 = two_level_toeplitz(-1, false);
            let m23 = ComplexMatrix::identity(m1 * m2).kron(&ones_row(m3));
            let m33 = m23.conj_transpose();
            Some(IdentityFactors::new(m13, m23, m33, m43))
        } else {
            None
        };

        CouplingSet {
            dims,
            class: spec.class(),
            cores: [
                displacement_core(m1),
                displacement_core(m2),
                displacement_core(m3),
            ],
            ops: [
                displacement_op(dims, 1).expect("valid level"),
                displacement_op(dims, 2).expect("valid level"),
                displacement_op(dims, 3).expect("valid level"),
            ],
            factors: [f1, f2],
            third,
            k1: [k11, k12],
            k_row,
            n_col,
            l: full_sum(dims),
            lp: [
                level_sum(dims, 1).expect("valid level"),
                level_sum(dims, 2).expect("valid level"),
            ],
        }
    }

    pub fn dims(&self) -> DimTriple {
        self.dims
    }

    pub fn class(&self) -> StructureClass {
        self.class
    }

    pub fn core(&self, p: usize) -> Result<&ComplexMatrix> {
        match p {
            1..=3 => Ok(&self.cores[p - 1]),
            _ => Err(Error::BadAxis { p }),
        }
    }

    pub fn op(&self, p: usize) -> Result<&ComplexMatrix> {
        match p {
            1..=3 => Ok(&self.ops[p - 1]),
            _ => Err(Error::BadAxis { p }),
        }
    }

    pub fn factors(&self, p: usize) -> Result<&IdentityFactors> {
        match p {
            1 | 2 => Ok(&self.factors[p - 1]),
            3 => self.third.as_ref().ok_or(Error::NotThreeD {
                class: self.class.to_string(),
            }),
            _ => Err(Error::BadAxis { p }),
        }
    }
}

/// Relative residual of the level-p structure identity
/// A_p T - T A_p^* = i Pi_p PiHat_p, scaled by max(|T|_max, 1).
pub fn structure_identity_residual(t: &ComplexMatrix, cs: &CouplingSet, p: usize) -> Result<f64> {
    let f = cs.factors(p)?;
    let a = cs.op(p)?;
    let lhs = &(a * t) - &(t * &a.conj_transpose());
    let rhs = (&f.pi * &f.pi_hat).scale(Complex64::I);
    Ok(max_abs_diff(&lhs, &rhs) / t.norm_max().max(1.0))
}

/// Relative residual of the identity satisfied by the fourth factor of the
/// complementary level (k in {1, 2}), together with the consistency of its
/// low-rank right-hand side against the independently assembled pieces.
pub fn fourth_factor_identity_residual(cs: &CouplingSet, k: usize) -> Result<f64> {
    if !(k == 1 || k == 2) {
        return Err(Error::BadAxis { p: k });
    }
    let p = 3 - k;
    let dims = cs.dims();
    let m4p = &cs.factors(p)?.m4;
    let core_k = cs.core(k)?;
    let eye3 = ComplexMatrix::identity(dims.m3());
    let lhs = &(&core_k.kron(&eye3) * m4p) - &(m4p * &cs.op(k)?.conj_transpose());

    let q_k = &(&cs.k1[k - 1] * &cs.factors(k)?.m2) + &(&cs.lp[k - 1] * &cs.k_row);
    let r1 = max_abs_diff(&lhs, &q_k.scale(Complex64::I)) / m4p.norm_max().max(1.0);

    // same right-hand side from the definition-level pieces
    let ones_row = |n: usize| ComplexMatrix::ones_col(n).transpose();
    let k2 = match k {
        1 => ones_row(dims.m1()).kron(&ComplexMatrix::identity(dims.m2() * dims.m3())),
        _ => ComplexMatrix::identity(dims.m1())
            .kron(&ones_row(dims.m2()))
            .kron(&eye3),
    };
    let k3 = level_sum(dims, k)?;
    let q_k_pieces = &(&cs.k1[k - 1] * &k2) + &(&k3 * &cs.k_row);
    let r2 = max_abs_diff(&q_k, &q_k_pieces) / q_k.norm_max().max(1.0);

    Ok(r1.max(r2))
}

/// Relative residual of the identity satisfied by the first factor of the
/// complementary level: A_p M_1k - M_1k (core_p^* (x) I) = i V_p with
/// V_p = N Lp^* + M_3p K_1k.
pub fn first_factor_identity_residual(cs: &CouplingSet, p: usize) -> Result<f64> {
    if !(p == 1 || p == 2) {
        return Err(Error::BadAxis { p });
    }
    let k = 3 - p;
    let dims = cs.dims();
    let m1k = &cs.factors(k)?.m1;
    let core_p_star = cs.core(p)?.conj_transpose();
    let eye3 = ComplexMatrix::identity(dims.m3());
    let lhs = &(cs.op(p)? * m1k) - &(m1k * &core_p_star.kron(&eye3));

    let v_p = &(&cs.n_col * &cs.lp[p - 1].conj_transpose()) + &(&cs.factors(p)?.m3 * &cs.k1[k - 1]);
    Ok(max_abs_diff(&lhs, &v_p.scale(Complex64::I)) / m1k.norm_max().max(1.0))
}
