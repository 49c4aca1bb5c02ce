//! Class-specific shortcuts: the DSTU transposition relations that produce
//! u from uhat and one constant block from the other, the self-adjoint
//! conjugation relations, and the Moebius change of variables.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cplx, ComplexMatrix};
use crate::structured::{DimTriple, ExchangeSet, StructureClass};

/// Moebius map (i/2)(z + 1)/(z - 1) linking polynomial arguments to
/// resolvent evaluation points.
pub fn phi(z: Complex64) -> Result<Complex64> {
    if (z - 1.0).norm() <= 1e-12 {
        return Err(Error::PhiPole);
    }
    Ok(cplx(0.0, 0.5) * (z + 1.0) / (z - 1.0))
}

/// Scalar prefactor of the DSTU transposition relation:
/// the product over both outer levels of ((mu_p - i/2)/(mu_p + i/2))^m_p.
pub fn q_factor(dims: DimTriple, mu: [Complex64; 2]) -> Result<Complex64> {
    let half_i = cplx(0.0, 0.5);
    let mut q = Complex64::ONE;
    for (p, &m) in [dims.m1(), dims.m2()].iter().enumerate() {
        let denom = mu[p] + half_i;
        if denom.norm() <= 1e-12 {
            return Err(Error::PoleAtSpectrum { z: mu[p] });
        }
        q *= ((mu[p] - half_i) / denom).powu(m as u32);
    }
    Ok(q)
}

/// Block anti-symmetric exchange [[0, -U_k (x) U_3], [U_k (x) U_3, 0]];
/// squares to minus the identity.
pub fn u_tilde(ex: &ExchangeSet, k: usize) -> Result<ComplexMatrix> {
    let uk = ex.level(k)?;
    let block = uk.kron(&ex.u3);
    let n = block.rows();
    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    out.set_block(0, n, &block.scale(cplx(-1.0, 0.0)));
    out.set_block(n, 0, &block);
    Ok(out)
}

fn require_dstu(class: StructureClass) -> Result<()> {
    match class {
        StructureClass::Dstu | StructureClass::Toeplitz3d => Ok(()),
        other => Err(Error::NotDstu {
            class: other.to_string(),
        }),
    }
}

fn require_self_adjoint(class: StructureClass) -> Result<()> {
    match class {
        StructureClass::SelfAdjoint => Ok(()),
        other => Err(Error::NotSelfAdjoint {
            class: other.to_string(),
        }),
    }
}

/// DSTU shortcut u_p(mu) = -q(mu) U_3 uhat_p(mu)^T UTilde_k, with
/// `uhat_p_at_mu` the level-p hat function evaluated at the same point.
pub fn dstu_u_from_uhat(
    class: StructureClass,
    ex: &ExchangeSet,
    dims: DimTriple,
    uhat_p_at_mu: &ComplexMatrix,
    mu: [Complex64; 2],
    p: usize,
) -> Result<ComplexMatrix> {
    require_dstu(class)?;
    if !(p == 1 || p == 2) {
        return Err(Error::BadAxis { p });
    }
    let k = 3 - p;
    let q = q_factor(dims, mu)?;
    let ut = u_tilde(ex, k)?;
    Ok((&(&ex.u3 * &uhat_p_at_mu.transpose()) * &ut).scale(-q))
}

/// DSTU shortcut for the constant block: G21 = UTilde_1 G12^T UTilde_2.
pub fn dstu_g21_from_g12(
    class: StructureClass,
    ex: &ExchangeSet,
    g12: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    require_dstu(class)?;
    let u1 = u_tilde(ex, 1)?;
    let u2 = u_tilde(ex, 2)?;
    Ok(&(&u1 * &g12.transpose()) * &u2)
}

/// Half-swap J_p: exchanges the two stacked halves of the level-p factor
/// block; J_1 acts on pairs of m2 m3 rows, J_2 on pairs of m1 m3 rows.
pub fn sa_j(dims: DimTriple, p: usize) -> Result<ComplexMatrix> {
    let n = match p {
        1 => dims.m2() * dims.m3(),
        2 => dims.m1() * dims.m3(),
        _ => return Err(Error::BadAxis { p }),
    };
    let eye = ComplexMatrix::identity(n);
    let mut j = ComplexMatrix::zeros(2 * n, 2 * n);
    j.set_block(0, n, &eye);
    j.set_block(n, 0, &eye);
    Ok(j)
}

/// Self-adjoint shortcut u_p(mu) = uhat_p(conj mu)^* J_p, with
/// `uhat_p_at_conj_mu` evaluated at the componentwise conjugate point.
pub fn sa_u_from_uhat(
    class: StructureClass,
    dims: DimTriple,
    uhat_p_at_conj_mu: &ComplexMatrix,
    p: usize,
) -> Result<ComplexMatrix> {
    require_self_adjoint(class)?;
    Ok(&uhat_p_at_conj_mu.conj_transpose() * &sa_j(dims, p)?)
}

/// Self-adjoint shortcut for the constant block:
/// G21 = -J_2 (G12^* - i diag(L_1 L_2^*, -L_1 L_2^*)) J_1.
pub fn sa_g21_from_g12(
    class: StructureClass,
    dims: DimTriple,
    g12: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    require_self_adjoint(class)?;
    let l1 = ComplexMatrix::ones_col(dims.m1()).kron(&ComplexMatrix::identity(dims.m3()));
    let l2 = ComplexMatrix::ones_col(dims.m2()).kron(&ComplexMatrix::identity(dims.m3()));
    let l1_l2s = &l1 * &l2.conj_transpose();
    let n = l1_l2s.rows();
    let w = l1_l2s.cols();
    let mut corr = ComplexMatrix::zeros(2 * n, 2 * w);
    corr.set_block(0, 0, &l1_l2s);
    corr.set_block(n, w, &l1_l2s.scale(cplx(-1.0, 0.0)));

    let inner = &g12.conj_transpose() - &corr.scale(Complex64::I);
    let j2 = sa_j(dims, 2)?;
    let j1 = sa_j(dims, 1)?;
    Ok((&(&j2 * &inner) * &j1).scale(cplx(-1.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::CouplingSet;
    use crate::linalg::{max_abs_diff, rel_residual};
    use crate::recovery::direct::{u_direct, uhat_direct, InverseData};
    use crate::recovery::minimal::MinimalData;
    use crate::structured::random_spec;

    fn dims(m1: usize, m2: usize, m3: usize) -> DimTriple {
        DimTriple::new(m1, m2, m3).unwrap()
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(cplx(-1.0, 0.0)).unwrap(), Complex64::ZERO);
        assert_eq!(phi(Complex64::ZERO).unwrap(), cplx(0.0, -0.5));
        assert_eq!(phi(Complex64::ONE).unwrap_err(), Error::PhiPole);
    }

    #[test]
    fn q_at_zero_alternates_sign() {
        for (m1, m2) in [(2usize, 2usize), (2, 3), (3, 3)] {
            let d = dims(m1, m2, 2);
            let q = q_factor(d, [Complex64::ZERO, Complex64::ZERO]).unwrap();
            let want = if (m1 + m2) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((q - cplx(want, 0.0)).norm() <= 1e-15);
        }
    }

    #[test]
    fn u_tilde_squares_to_minus_identity() {
        let d = dims(2, 3, 2);
        let ex = ExchangeSet::new(d);
        for k in 1..=2 {
            let ut = u_tilde(&ex, k).unwrap();
            let sq = &ut * &ut;
            let want = ComplexMatrix::identity(ut.rows()).scale(cplx(-1.0, 0.0));
            assert!(max_abs_diff(&sq, &want) <= 1e-15);
        }
    }

    #[test]
    fn dstu_u_from_uhat_matches_direct() {
        for class in [StructureClass::Dstu, StructureClass::Toeplitz3d] {
            let d = dims(2, 2, 2);
            let spec = random_spec(d, 3, class, None);
            let cs = CouplingSet::build(&spec);
            let id = InverseData::compute(&spec, &cs).unwrap();
            let ex = ExchangeSet::new(d);
            let mu = [cplx(0.2, 0.1), cplx(-0.3, 0.15)];
            for p in 1..=2 {
                let uhat_mu = uhat_direct(&cs, &id, p, mu).unwrap();
                let got = dstu_u_from_uhat(class, &ex, d, &uhat_mu, mu, p).unwrap();
                let want = u_direct(&cs, &id, p, mu).unwrap();
                assert!(rel_residual(&got, &want) <= 1e-9, "{class} p={p}");
            }
        }
    }

    #[test]
    fn dstu_guard() {
        let d = dims(2, 2, 2);
        let ex = ExchangeSet::new(d);
        let m = ComplexMatrix::zeros(8, 2);
        let err = dstu_u_from_uhat(
            StructureClass::General,
            &ex,
            d,
            &m,
            [Complex64::ZERO, Complex64::ZERO],
            1,
        );
        assert!(matches!(err.unwrap_err(), Error::NotDstu { .. }));
    }

    #[test]
    fn dstu_constant_block_relation() {
        let d = dims(2, 3, 2);
        let spec = random_spec(d, 5, StructureClass::Dstu, None);
        let cs = CouplingSet::build(&spec);
        let id = InverseData::compute(&spec, &cs).unwrap();
        let md = MinimalData::compute(&cs, &id);
        let ex = ExchangeSet::new(d);
        let got = dstu_g21_from_g12(spec.class(), &ex, &md.g12).unwrap();
        assert!(rel_residual(&got, &md.g21) <= 1e-12);
    }

    #[test]
    fn dstu_gamma_hat_transposition_law() {
        let d = dims(2, 2, 3);
        let spec = random_spec(d, 7, StructureClass::Dstu, None);
        let cs = CouplingSet::build(&spec);
        let id = InverseData::compute(&spec, &cs).unwrap();
        let ex = ExchangeSet::new(d);
        for p in 1..=2usize {
            let k = 3 - p;
            let ut = u_tilde(&ex, k).unwrap();
            let f = cs.factors(p).unwrap();
            let zeros = ComplexMatrix::zeros(f.m3.rows(), f.m3.cols());
            let tail = ComplexMatrix::hstack(&[&zeros, &f.m3]);
            let want = &(&(&ex.u * &id.gamma[p - 1]) * &ut) + &tail;
            assert!(rel_residual(&id.gamma_hat[p - 1].transpose(), &want) <= 1e-11);
        }
    }

    #[test]
    fn sa_j_is_involution() {
        let d = dims(3, 2, 2);
        for p in 1..=2 {
            let j = sa_j(d, p).unwrap();
            assert_eq!(&j * &j, ComplexMatrix::identity(j.rows()));
        }
    }

    #[test]
    fn sa_u_from_uhat_matches_direct() {
        let d = dims(2, 2, 2);
        let spec = random_spec(d, 11, StructureClass::SelfAdjoint, None);
        let cs = CouplingSet::build(&spec);
        let id = InverseData::compute(&spec, &cs).unwrap();
        let mu = [cplx(0.25, 0.1), cplx(-0.2, -0.15)];
        let mu_conj = [mu[0].conj(), mu[1].conj()];
        for p in 1..=2 {
            let uhat_conj = uhat_direct(&cs, &id, p, mu_conj).unwrap();
            let got = sa_u_from_uhat(spec.class(), d, &uhat_conj, p).unwrap();
            let want = u_direct(&cs, &id, p, mu).unwrap();
            assert!(rel_residual(&got, &want) <= 1e-9, "p={p}");
        }
    }

    #[test]
    fn sa_constant_block_relation() {
        let d = dims(3, 2, 2);
        let spec = random_spec(d, 13, StructureClass::SelfAdjoint, None);
        let cs = CouplingSet::build(&spec);
        let id = InverseData::compute(&spec, &cs).unwrap();
        let md = MinimalData::compute(&cs, &id);
        let got = sa_g21_from_g12(spec.class(), d, &md.g12).unwrap();
        assert!(rel_residual(&got, &md.g21) <= 1e-12);
    }

    #[test]
    fn sa_factor_swap_is_exact() {
        let d = dims(2, 3, 2);
        let spec = random_spec(d, 17, StructureClass::SelfAdjoint, None);
        let cs = CouplingSet::build(&spec);
        for p in 1..=2usize {
            let f = cs.factors(p).unwrap();
            let swapped = &f.pi_hat.conj_transpose() * &sa_j(d, p).unwrap();
            assert_eq!(swapped, f.pi);
        }
    }

    #[test]
    fn sa_guard() {
        let d = dims(2, 2, 2);
        let err = sa_g21_from_g12(StructureClass::Dstu, d, &ComplexMatrix::zeros(8, 8));
        assert!(matches!(err.unwrap_err(), Error::NotSelfAdjoint { .. }));
    }
}
