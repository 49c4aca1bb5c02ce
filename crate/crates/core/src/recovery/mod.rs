//! Inverse-side data and the recovery pipeline: direct evaluation of the
//! kernel, its reconstruction from the constant blocks plus scalar-block
//! samples, the reflection coefficient with its Moebius change of
//! variables, the DSTU and self-adjoint shortcuts, and information counts.

mod direct;
mod minimal;
mod sampling;
mod shortcuts;

pub use direct::{
    omega_direct, rho_direct, rho_from_omega, u_direct, u_stacked, uhat_direct, uhat_stacked,
    v_direct, vhat_direct, InverseData,
};
pub use minimal::{
    alpha, beta, build_e, build_g, omega_min, recover_u, recover_uhat, split_u, split_uhat, theta,
    u_annihilator, uhat_annihilator, vartheta, MinimalData,
};
pub use sampling::{sample_pairs, sample_points, SamplePair};
pub use shortcuts::{
    dstu_g21_from_g12, dstu_u_from_uhat, phi, q_factor, sa_g21_from_g12, sa_j, sa_u_from_uhat,
    u_tilde,
};

use crate::structured::{DimTriple, StructureClass};

/// Entry counts for the different ways of describing the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct InfoCount {
    /// Entries determining the matrix itself.
    pub full_entries: u64,
    /// Entries of the two one-identity factors R Pi_p and PiHat_p R,
    /// indexed by the identity used (4 m^2 / m_p each).
    pub naive_entries: [u64; 3],
    /// Constant blocks plus the scalar coupling row: 5 m1 m2 m3^2.
    pub minimal_entries: u64,
}

/// Counts the entries needed to describe the matrix, to run one-identity
/// recovery, and to run the minimal-information recovery.
pub fn info_count(dims: DimTriple, class: StructureClass) -> InfoCount {
    let (m1, m2, m3) = (dims.m1() as u64, dims.m2() as u64, dims.m3() as u64);
    let m = m1 * m2 * m3;
    let full_entries = match class {
        StructureClass::Toeplitz3d => (2 * m1 - 1) * (2 * m2 - 1) * (2 * m3 - 1),
        _ => (2 * m1 - 1) * (2 * m2 - 1) * m3 * m3,
    };
    InfoCount {
        full_entries,
        naive_entries: [4 * m * m / m1, 4 * m * m / m2, 4 * m * m / m3],
        minimal_entries: 5 * m1 * m2 * m3 * m3,
    }
}
