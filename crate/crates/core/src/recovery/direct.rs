//! Everything that evaluates against the dense inverse: the inverse-side
//! factors, the kernel sandwich, the one-identity vector functions and
//! their corrected variants, and the reflection coefficient.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::identities::{
    ones_col_resolvent, ones_row_resolvent, resolvent_apply, CouplingSet, ResolventKind, Side,
};
use crate::linalg::{inverse, ComplexMatrix};
use crate::structured::{BlockTbtSpec, DimTriple};

/// The dense inverse together with its identity-side factors.
#[derive(Debug, Clone)]
pub struct InverseData {
    /// Dense inverse of the assembled matrix.
    pub r: ComplexMatrix,
    /// R Pi_p for p = 1, 2 (m x 2m/m_p each).
    pub gamma: [ComplexMatrix; 2],
    /// PiHat_p R for p = 1, 2 (2m/m_p x m each).
    pub gamma_hat: [ComplexMatrix; 2],
}

impl InverseData {
    /// Inverts the assembled spec and forms the inverse-side factors.
    pub fn compute(spec: &BlockTbtSpec, cs: &CouplingSet) -> Result<Self> {
        let t = spec.assemble();
        let r = inverse(&t).map_err(|e| match e {
            Error::SingularMatrix { pivot_index } => Error::TNotInvertible { pivot_index },
            other => other,
        })?;
        Ok(Self::from_inverse(r, cs))
    }

    pub fn from_inverse(r: ComplexMatrix, cs: &CouplingSet) -> Self {
        let f1 = cs.factors(1).expect("level 1 always present");
        let f2 = cs.factors(2).expect("level 2 always present");
        let gamma = [&r * &f1.pi, &r * &f2.pi];
        let gamma_hat = [&f1.pi_hat * &r, &f2.pi_hat * &r];
        InverseData {
            r,
            gamma,
            gamma_hat,
        }
    }

    /// [Gamma_1 Gamma_2]
    pub fn gamma_full(&self) -> ComplexMatrix {
        ComplexMatrix::hstack(&[&self.gamma[0], &self.gamma[1]])
    }

    /// col[GammaHat_1; GammaHat_2]
    pub fn gamma_hat_full(&self) -> ComplexMatrix {
        ComplexMatrix::vstack(&[&self.gamma_hat[0], &self.gamma_hat[1]])
    }
}

/// Row L^* (A_1^* - mu_1)^'t (A_2^* - mu_2)^'t, of shape m3 x m.
pub(crate) fn adjoint_row(cs: &CouplingSet, mu: [Complex64; 2]) -> Result<ComplexMatrix> {
    let dims = cs.dims();
    let y = cs.l.conj_transpose();
    let y = resolvent_apply(dims, 1, mu[0], ResolventKind::Adjoint, Side::Right, &y)?;
    resolvent_apply(dims, 2, mu[1], ResolventKind::Adjoint, Side::Right, &y)
}

/// Column (A_1 - lambda_1)^'t (A_2 - lambda_2)^'t L, of shape m x m3.
pub(crate) fn standard_col(cs: &CouplingSet, lambda: [Complex64; 2]) -> Result<ComplexMatrix> {
    let dims = cs.dims();
    let y = resolvent_apply(
        dims,
        2,
        lambda[1],
        ResolventKind::Standard,
        Side::Left,
        &cs.l,
    )?;
    resolvent_apply(dims, 1, lambda[0], ResolventKind::Standard, Side::Left, &y)
}

/// The m3 x m3 kernel of the inverse: the summation row conjugated through
/// both adjoint resolvents, the inverse, both standard resolvents, and the
/// summation column.
pub fn omega_direct(
    cs: &CouplingSet,
    id: &InverseData,
    lambda: [Complex64; 2],
    mu: [Complex64; 2],
) -> Result<ComplexMatrix> {
    let row = adjoint_row(cs, mu)?;
    let col = standard_col(cs, lambda)?;
    Ok(&(&row * &id.r) * &col)
}

/// v_p(mu): the adjoint resolvent row applied to Gamma_p.
pub fn v_direct(
    cs: &CouplingSet,
    id: &InverseData,
    p: usize,
    mu: [Complex64; 2],
) -> Result<ComplexMatrix> {
    if !(p == 1 || p == 2) {
        return Err(Error::BadAxis { p });
    }
    Ok(&adjoint_row(cs, mu)? * &id.gamma[p - 1])
}

/// vhat_p(lambda): GammaHat_p applied to the standard resolvent column.
pub fn vhat_direct(
    cs: &CouplingSet,
    id: &InverseData,
    p: usize,
    lambda: [Complex64; 2],
) -> Result<ComplexMatrix> {
    if !(p == 1 || p == 2) {
        return Err(Error::BadAxis { p });
    }
    Ok(&id.gamma_hat[p - 1] * &standard_col(cs, lambda)?)
}

/// u_p(mu) = v_p(mu) - i [row (x) I_m3, 0], the row being the closed-form
/// ones-row resolvent of the complementary level.
pub fn u_direct(
    cs: &CouplingSet,
    id: &InverseData,
    p: usize,
    mu: [Complex64; 2],
) -> Result<ComplexMatrix> {
    let dims = cs.dims();
    let v = v_direct(cs, id, p, mu)?;
    let k = 3 - p; // complementary level
    let row = ones_row_resolvent(dims.level(k)?, mu[k - 1])?;
    let corr = row.kron(&ComplexMatrix::identity(dims.m3()));
    let zeros = ComplexMatrix::zeros(corr.rows(), corr.cols());
    let corr = ComplexMatrix::hstack(&[&corr, &zeros]).scale(Complex64::I);
    Ok(&v - &corr)
}

/// uhat_p(lambda) = vhat_p(lambda) + i col[0; col (x) I_m3].
pub fn uhat_direct(
    cs: &CouplingSet,
    id: &InverseData,
    p: usize,
    lambda: [Complex64; 2],
) -> Result<ComplexMatrix> {
    let dims = cs.dims();
    let vhat = vhat_direct(cs, id, p, lambda)?;
    let k = 3 - p;
    let col = ones_col_resolvent(dims.level(k)?, lambda[k - 1])?;
    let corr = col.kron(&ComplexMatrix::identity(dims.m3()));
    let zeros = ComplexMatrix::zeros(corr.rows(), corr.cols());
    let corr = ComplexMatrix::vstack(&[&zeros, &corr]).scale(Complex64::I);
    Ok(&vhat + &corr)
}

/// [u_1(mu) u_2(mu)], of shape m3 x 2(m1 + m2) m3.
pub fn u_stacked(cs: &CouplingSet, id: &InverseData, mu: [Complex64; 2]) -> Result<ComplexMatrix> {
    let u1 = u_direct(cs, id, 1, mu)?;
    let u2 = u_direct(cs, id, 2, mu)?;
    Ok(ComplexMatrix::hstack(&[&u1, &u2]))
}

/// col[uhat_1(lambda); uhat_2(lambda)], of shape 2(m1 + m2) m3 x m3.
pub fn uhat_stacked(
    cs: &CouplingSet,
    id: &InverseData,
    lambda: [Complex64; 2],
) -> Result<ComplexMatrix> {
    let u1 = uhat_direct(cs, id, 1, lambda)?;
    let u2 = uhat_direct(cs, id, 2, lambda)?;
    Ok(ComplexMatrix::vstack(&[&u1, &u2]))
}

fn power_col(n: usize, x: Complex64) -> ComplexMatrix {
    let mut col = ComplexMatrix::zeros(n, 1);
    let mut pow = Complex64::ONE;
    for i in 0..n {
        col[(i, 0)] = pow;
        pow *= x;
    }
    col
}

/// Polynomial evaluation map h_1(x_1) (x) h_2(x_2) (x) I_m3, of shape m x m3.
pub fn h_map(dims: DimTriple, x: [Complex64; 2]) -> ComplexMatrix {
    power_col(dims.m1(), x[0])
        .kron(&power_col(dims.m2(), x[1]))
        .kron(&ComplexMatrix::identity(dims.m3()))
}

/// The matrix reflection coefficient h(y)^T R h(x), a matrix polynomial in
/// (x_1, x_2, y_1, y_2) that determines the inverse.
pub fn rho_direct(
    id: &InverseData,
    dims: DimTriple,
    x: [Complex64; 2],
    y: [Complex64; 2],
) -> ComplexMatrix {
    let hy = h_map(dims, y);
    let hx = h_map(dims, x);
    &(&hy.transpose() * &id.r) * &hx
}

/// Same reflection coefficient through the kernel route: evaluate the
/// kernel at the Moebius images of the arguments and divide by
/// (x_1 - 1)(x_2 - 1)(y_1 - 1)(y_2 - 1).
pub fn rho_from_omega(
    cs: &CouplingSet,
    id: &InverseData,
    x: [Complex64; 2],
    y: [Complex64; 2],
) -> Result<ComplexMatrix> {
    let lambda = [super::phi(x[0])?, super::phi(x[1])?];
    let mu = [-super::phi(y[0])?, -super::phi(y[1])?];
    let omega = omega_direct(cs, id, lambda, mu)?;
    let pref = ((x[0] - 1.0) * (x[1] - 1.0) * (y[0] - 1.0) * (y[1] - 1.0)).inv();
    Ok(omega.scale(pref))
}
