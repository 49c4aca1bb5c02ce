//! Seeded generic sample points for kernel and reflection-coefficient
//! evaluation.
//!
//! Points are drawn in the annulus 0.1 <= |z| <= 0.6. The core spectrum
//! points +-i/2 are defective (one Jordan-type block each), so resolvent
//! norms and the recovery-system conditioning grow like dist^-m_p near
//! them; points keep a distance of 0.05 from both so that every evaluator
//! stays well conditioned. The Moebius pole at 1 only needs a hair's
//! width. Sample pairs additionally keep |lambda_p - mu_p| >= 1e-3 for
//! both levels.

use num_complex::Complex64;

use crate::linalg::cplx;
use crate::rng::XorShift64Star;

const EXCLUSION: f64 = 1e-3;
const CORE_EXCLUSION: f64 = 0.05;

fn admissible(z: Complex64) -> bool {
    let r = z.norm();
    (0.1..=0.6).contains(&r)
        && (z - cplx(0.0, 0.5)).norm() > CORE_EXCLUSION
        && (z - cplx(0.0, -0.5)).norm() > CORE_EXCLUSION
        && (z - cplx(1.0, 0.0)).norm() > EXCLUSION
}

fn draw(rng: &mut XorShift64Star) -> Complex64 {
    loop {
        let z = cplx(0.6 * rng.next_unit(), 0.6 * rng.next_unit());
        if admissible(z) {
            return z;
        }
    }
}

/// Deterministic stream of admissible sample points.
pub fn sample_points(seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = XorShift64Star::new(seed);
    (0..count).map(|_| draw(&mut rng)).collect()
}

/// One evaluation pair for the kernel: forward arguments and adjoint-side
/// arguments, separated on both levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePair {
    pub lambda: [Complex64; 2],
    pub mu: [Complex64; 2],
}

/// Deterministic stream of well-separated sample pairs.
pub fn sample_pairs(seed: u64, count: usize) -> Vec<SamplePair> {
    let mut rng = XorShift64Star::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let pair = SamplePair {
            lambda: [draw(&mut rng), draw(&mut rng)],
            mu: [draw(&mut rng), draw(&mut rng)],
        };
        let separated = (0..2).all(|p| (pair.lambda[p] - pair.mu[p]).norm() >= EXCLUSION);
        if separated {
            out.push(pair);
        }
    }
    out
}
