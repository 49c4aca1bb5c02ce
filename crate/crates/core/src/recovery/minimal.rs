//! The minimal-information pathway: the two constant coupling blocks, the
//! scalar-block sample sources, the block system matrices they determine,
//! and the reconstruction of the one-identity vector functions from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::identities::{resolvent_apply, CouplingSet, ResolventKind, Side};
use crate::linalg::{cplx, lu_solve, ComplexMatrix};
use crate::recovery::direct::InverseData;
use crate::structured::DimTriple;

/// The data the reconstruction runs on: the constant off-diagonal blocks of
/// the two block systems, the scalar coupling row, and the two products
/// that generate the scalar-block samples. Everything else of the procedure
/// depends only on the level sizes.
#[derive(Debug, Clone)]
pub struct MinimalData {
    /// Constant block of the forward system, 2 m2 m3 x 2 m1 m3.
    pub g12: ComplexMatrix,
    /// Constant block of the forward system, 2 m1 m3 x 2 m2 m3.
    pub g21: ComplexMatrix,
    /// Constant block of the adjoint-side system, same shape as `g12`.
    pub e12: ComplexMatrix,
    /// Constant block of the adjoint-side system, same shape as `g21`.
    pub e21: ComplexMatrix,
    /// Copy of the scalar coupling row (m3 x m).
    pub k: ComplexMatrix,
    /// K R, the sample source for the forward scalar block.
    kr: ComplexMatrix,
    /// R N, the sample source for the adjoint scalar block.
    rn: ComplexMatrix,
}

/// Corrections appearing in the constant blocks: a 2 x 2 arrangement of
/// equally sized blocks.
fn four_block(
    tl: &ComplexMatrix,
    tr: &ComplexMatrix,
    bl: &ComplexMatrix,
    br: &ComplexMatrix,
) -> ComplexMatrix {
    ComplexMatrix::vstack(&[
        &ComplexMatrix::hstack(&[tl, tr]),
        &ComplexMatrix::hstack(&[bl, br]),
    ])
}

impl MinimalData {
    pub fn compute(cs: &CouplingSet, id: &InverseData) -> Self {
        let f1 = cs.factors(1).expect("level 1 present");
        let f2 = cs.factors(2).expect("level 2 present");
        let pihat2_gamma1 = &f2.pi_hat * &id.gamma[0];
        let pihat1_gamma2 = &f1.pi_hat * &id.gamma[1];

        let l1_l2s = &cs.lp[0] * &cs.lp[1].conj_transpose();
        let l2_l1s = &cs.lp[1] * &cs.lp[0].conj_transpose();
        let z12 = ComplexMatrix::zeros(l1_l2s.rows(), l1_l2s.cols());
        let z21 = ComplexMatrix::zeros(l2_l1s.rows(), l2_l1s.cols());

        let g21 =
            (&pihat2_gamma1 - &four_block(&l1_l2s, &z12, &cs.k1[0], &z12)).scale(Complex64::I);
        let g12 =
            (&pihat1_gamma2 - &four_block(&l2_l1s, &z21, &cs.k1[1], &z21)).scale(Complex64::I);
        let e21 =
            (&pihat2_gamma1 - &four_block(&z12, &z12, &cs.k1[0], &l1_l2s)).scale(-Complex64::I);
        let e12 =
            (&pihat1_gamma2 - &four_block(&z21, &z21, &cs.k1[1], &l2_l1s)).scale(-Complex64::I);

        MinimalData {
            g12,
            g21,
            e12,
            e21,
            k: cs.k_row.clone(),
            kr: &cs.k_row * &id.r,
            rn: &id.r * &cs.n_col,
        }
    }

    /// Assembles minimal data from transmitted parts: the constant blocks,
    /// the scalar coupling row, and the two sample-source products `K R`
    /// and `R N` that generate the scalar blocks of the reconstruction.
    pub fn from_parts(
        g12: ComplexMatrix,
        g21: ComplexMatrix,
        e12: ComplexMatrix,
        e21: ComplexMatrix,
        k: ComplexMatrix,
        kr: ComplexMatrix,
        rn: ComplexMatrix,
    ) -> Self {
        MinimalData {
            g12,
            g21,
            e12,
            e21,
            k,
            kr,
            rn,
        }
    }
}

fn pole_guard(z: Complex64, pole: Complex64) -> Result<()> {
    if (z - pole).norm() <= 1e-12 {
        return Err(Error::PoleAtSpectrum { z });
    }
    Ok(())
}

/// Forward block system: level-core diagonal blocks in lambda and the two
/// constant off-diagonal blocks; square of order 2 (m1 + m2) m3.
pub fn build_g(
    cs: &CouplingSet,
    md: &MinimalData,
    lambda: [Complex64; 2],
) -> Result<ComplexMatrix> {
    pole_guard(lambda[0], cplx(0.0, 0.5))?;
    pole_guard(lambda[1], cplx(0.0, 0.5))?;
    let dims = cs.dims();
    let eye3 = ComplexMatrix::identity(dims.m3());
    let d2 = (cs.core(2)? - &ComplexMatrix::identity(dims.m2()).scale(lambda[1])).kron(&eye3);
    let d1 = (cs.core(1)? - &ComplexMatrix::identity(dims.m1()).scale(lambda[0])).kron(&eye3);

    let n2 = d2.rows();
    let n1 = d1.rows();
    let mut g = ComplexMatrix::zeros(2 * n2 + 2 * n1, 2 * n2 + 2 * n1);
    g.set_block(0, 0, &d2);
    g.set_block(n2, n2, &d2);
    g.set_block(0, 2 * n2, &md.g12);
    g.set_block(2 * n2, 0, &md.g21);
    g.set_block(2 * n2, 2 * n2, &d1);
    g.set_block(2 * n2 + n1, 2 * n2 + n1, &d1);
    Ok(g)
}

/// Adjoint-side block system, with conjugate-transposed cores in mu.
pub fn build_e(cs: &CouplingSet, md: &MinimalData, mu: [Complex64; 2]) -> Result<ComplexMatrix> {
    pole_guard(mu[0], cplx(0.0, -0.5))?;
    pole_guard(mu[1], cplx(0.0, -0.5))?;
    let dims = cs.dims();
    let eye3 = ComplexMatrix::identity(dims.m3());
    let d2 = (&cs.core(2)?.conj_transpose() - &ComplexMatrix::identity(dims.m2()).scale(mu[1]))
        .kron(&eye3);
    let d1 = (&cs.core(1)?.conj_transpose() - &ComplexMatrix::identity(dims.m1()).scale(mu[0]))
        .kron(&eye3);

    let n2 = d2.rows();
    let n1 = d1.rows();
    let mut e = ComplexMatrix::zeros(2 * n2 + 2 * n1, 2 * n2 + 2 * n1);
    e.set_block(0, 0, &d2);
    e.set_block(n2, n2, &d2);
    e.set_block(0, 2 * n2, &md.e12);
    e.set_block(2 * n2, 0, &md.e21);
    e.set_block(2 * n2, 2 * n2, &d1);
    e.set_block(2 * n2 + n1, 2 * n2 + n1, &d1);
    Ok(e)
}

/// Scalar block K R (A_1 - l_1)^'t (A_2 - l_2)^'t L, the sample the
/// forward reconstruction consumes.
pub fn alpha(cs: &CouplingSet, md: &MinimalData, lambda: [Complex64; 2]) -> Result<ComplexMatrix> {
    let dims = cs.dims();
    let y = resolvent_apply(
        dims,
        1,
        lambda[0],
        ResolventKind::Standard,
        Side::Right,
        &md.kr,
    )?;
    let y = resolvent_apply(dims, 2, lambda[1], ResolventKind::Standard, Side::Right, &y)?;
    Ok(&y * &cs.l)
}

/// theta(lambda) = i (I + alpha(lambda)).
pub fn theta(cs: &CouplingSet, md: &MinimalData, lambda: [Complex64; 2]) -> Result<ComplexMatrix> {
    let a = alpha(cs, md, lambda)?;
    Ok((&ComplexMatrix::identity(a.rows()) + &a).scale(Complex64::I))
}

/// Scalar block L^* (A_1^* - m_1)^'t (A_2^* - m_2)^'t R N for the
/// adjoint-side reconstruction.
pub fn beta(cs: &CouplingSet, md: &MinimalData, mu: [Complex64; 2]) -> Result<ComplexMatrix> {
    let dims = cs.dims();
    let y = cs.l.conj_transpose();
    let y = resolvent_apply(dims, 1, mu[0], ResolventKind::Adjoint, Side::Right, &y)?;
    let y = resolvent_apply(dims, 2, mu[1], ResolventKind::Adjoint, Side::Right, &y)?;
    Ok(&y * &md.rn)
}

/// vartheta(mu) = -i (I + beta(mu)).
pub fn vartheta(cs: &CouplingSet, md: &MinimalData, mu: [Complex64; 2]) -> Result<ComplexMatrix> {
    let b = beta(cs, md, mu)?;
    Ok((&ComplexMatrix::identity(b.rows()) + &b).scale(-Complex64::I))
}

/// Right-hand side column col[0; L_2; 0; L_1] of the forward system.
fn rhs_col(cs: &CouplingSet) -> ComplexMatrix {
    let dims = cs.dims();
    let z2 = ComplexMatrix::zeros(dims.m2() * dims.m3(), dims.m3());
    let z1 = ComplexMatrix::zeros(dims.m1() * dims.m3(), dims.m3());
    ComplexMatrix::vstack(&[&z2, &cs.lp[1], &z1, &cs.lp[0]])
}

/// Row [L_2^*, 0, L_1^*, 0] of the adjoint-side system.
fn lhs_row(cs: &CouplingSet) -> ComplexMatrix {
    let dims = cs.dims();
    let z2 = ComplexMatrix::zeros(dims.m3(), dims.m2() * dims.m3());
    let z1 = ComplexMatrix::zeros(dims.m3(), dims.m1() * dims.m3());
    ComplexMatrix::hstack(&[
        &cs.lp[1].conj_transpose(),
        &z2,
        &cs.lp[0].conj_transpose(),
        &z1,
    ])
}

/// Reconstructs the stacked col[uhat_1; uhat_2] from the block system and
/// the scalar block alone.
pub fn recover_uhat(
    cs: &CouplingSet,
    md: &MinimalData,
    lambda: [Complex64; 2],
) -> Result<ComplexMatrix> {
    let g = build_g(cs, md, lambda)?;
    let rhs = &rhs_col(cs) * &theta(cs, md, lambda)?;
    lu_solve(&g, &rhs).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::GSingular,
        other => other,
    })
}

/// Reconstructs the stacked [u_1 u_2] from the adjoint-side system and its
/// scalar block.
pub fn recover_u(cs: &CouplingSet, md: &MinimalData, mu: [Complex64; 2]) -> Result<ComplexMatrix> {
    let e = build_e(cs, md, mu)?;
    let row = lhs_row(cs);
    // row . E^'t solved through the transposed system
    let w = lu_solve(&e.transpose(), &row.transpose())
        .map_err(|err| match err {
            Error::SingularMatrix { .. } => Error::ESingular,
            other => other,
        })?
        .transpose();
    Ok(&vartheta(cs, md, mu)? * &w)
}

/// Splits the stacked uhat into its level parts (heights 2 m2 m3, 2 m1 m3).
pub fn split_uhat(dims: DimTriple, uhat: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let top = 2 * dims.m2() * dims.m3();
    let bottom = 2 * dims.m1() * dims.m3();
    (
        uhat.block(0, 0, top, uhat.cols()),
        uhat.block(top, 0, bottom, uhat.cols()),
    )
}

/// Splits the stacked u into its level parts (widths 2 m2 m3, 2 m1 m3).
pub fn split_u(dims: DimTriple, u: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let left = 2 * dims.m2() * dims.m3();
    let right = 2 * dims.m1() * dims.m3();
    (
        u.block(0, 0, u.rows(), left),
        u.block(0, left, u.rows(), right),
    )
}

/// Kernel through the minimal pathway alone:
/// i (lambda_p - mu_p)^'t u_p(mu) uhat_p(lambda), with both vector
/// functions reconstructed rather than read off the inverse.
pub fn omega_min(
    cs: &CouplingSet,
    md: &MinimalData,
    lambda: [Complex64; 2],
    mu: [Complex64; 2],
    p: usize,
) -> Result<ComplexMatrix> {
    if !(p == 1 || p == 2) {
        return Err(Error::BadAxis { p });
    }
    if (lambda[p - 1] - mu[p - 1]).norm() <= 1e-12 {
        return Err(Error::DegenerateSamplePair { p });
    }
    let dims = cs.dims();
    let uhat = recover_uhat(cs, md, lambda)?;
    let u = recover_u(cs, md, mu)?;
    let (uhat1, uhat2) = split_uhat(dims, &uhat);
    let (u1, u2) = split_u(dims, &u);
    let (u_p, uhat_p) = if p == 1 { (u1, uhat1) } else { (u2, uhat2) };
    let factor = Complex64::I / (lambda[p - 1] - mu[p - 1]);
    Ok((&u_p * &uhat_p).scale(factor))
}

/// col[L_2; 0; -L_1; 0]; its conjugate transpose annihilates uhat.
pub fn uhat_annihilator(dims: DimTriple) -> ComplexMatrix {
    let l1 = ComplexMatrix::ones_col(dims.m1()).kron(&ComplexMatrix::identity(dims.m3()));
    let l2 = ComplexMatrix::ones_col(dims.m2()).kron(&ComplexMatrix::identity(dims.m3()));
    let z2 = ComplexMatrix::zeros(l2.rows(), l2.cols());
    let z1 = ComplexMatrix::zeros(l1.rows(), l1.cols());
    ComplexMatrix::vstack(&[&l2, &z2, &l1.scale(cplx(-1.0, 0.0)), &z1])
}

/// col[0; L_2; 0; -L_1]; u applied to it vanishes.
pub fn u_annihilator(dims: DimTriple) -> ComplexMatrix {
    let l1 = ComplexMatrix::ones_col(dims.m1()).kron(&ComplexMatrix::identity(dims.m3()));
    let l2 = ComplexMatrix::ones_col(dims.m2()).kron(&ComplexMatrix::identity(dims.m3()));
    let z2 = ComplexMatrix::zeros(l2.rows(), l2.cols());
    let z1 = ComplexMatrix::zeros(l1.rows(), l1.cols());
    ComplexMatrix::vstack(&[&z2, &l2, &z1, &l1.scale(cplx(-1.0, 0.0))])
}
