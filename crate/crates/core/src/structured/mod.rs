//! The four structure classes and their generators: block TBT (outer
//! Toeplitz of Toeplitz-of-blocks), DSTU, self-adjoint, and 3-D Toeplitz,
//! plus assembly into dense matrices and structure classification.

mod json;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cplx, max_abs_diff, ComplexMatrix};
use crate::rng::XorShift64Star;

pub use json::{parse_spec, spec3_to_json, spec_to_json, SpecFile};

/// Level sizes (m1, m2, m3) of a three-level structure; every level must
/// have at least two blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimTriple {
    m1: usize,
    m2: usize,
    m3: usize,
}

impl DimTriple {
    pub fn new(m1: usize, m2: usize, m3: usize) -> Result<Self> {
        if m1 < 2 || m2 < 2 || m3 < 2 {
            return Err(Error::BadDims { m1, m2, m3 });
        }
        Ok(DimTriple { m1, m2, m3 })
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn m3(&self) -> usize {
        self.m3
    }

    /// Total matrix order m1 * m2 * m3.
    pub fn m(&self) -> usize {
        self.m1 * self.m2 * self.m3
    }

    pub fn level(&self, p: usize) -> Result<usize> {
        match p {
            1 => Ok(self.m1),
            2 => Ok(self.m2),
            3 => Ok(self.m3),
            _ => Err(Error::BadAxis { p }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureClass {
    General,
    SelfAdjoint,
    Dstu,
    Toeplitz3d,
}

impl StructureClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StructureClass::General => "general",
            StructureClass::SelfAdjoint => "self_adjoint",
            StructureClass::Dstu => "dstu",
            StructureClass::Toeplitz3d => "toeplitz3d",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "general" => Some(StructureClass::General),
            "self_adjoint" => Some(StructureClass::SelfAdjoint),
            "dstu" => Some(StructureClass::Dstu),
            "toeplitz3d" => Some(StructureClass::Toeplitz3d),
            _ => None,
        }
    }

    pub const ALL: [StructureClass; 4] = [
        StructureClass::General,
        StructureClass::SelfAdjoint,
        StructureClass::Dstu,
        StructureClass::Toeplitz3d,
    ];
}

impl std::fmt::Display for StructureClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generating coefficients of a three-level structure: one m3 x m3 block
/// t_s^(r) per outer diagonal r and middle diagonal s, stored densely at
/// index (r + m1 - 1, s + m2 - 1).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTbtSpec {
    dims: DimTriple,
    class: StructureClass,
    coeffs: Vec<ComplexMatrix>,
}

impl BlockTbtSpec {
    pub fn new(dims: DimTriple, class: StructureClass, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        let want = (2 * dims.m1 - 1) * (2 * dims.m2 - 1);
        if coeffs.len() != want {
            return Err(Error::SpecIncomplete {
                have: coeffs.len(),
                want,
            });
        }
        for (idx, block) in coeffs.iter().enumerate() {
            if block.rows() != dims.m3 || block.cols() != dims.m3 {
                let span = 2 * dims.m2 - 1;
                return Err(Error::BadBlockShape {
                    r: (idx / span) as i64 - (dims.m1 as i64 - 1),
                    s: (idx % span) as i64 - (dims.m2 as i64 - 1),
                    rows: block.rows(),
                    cols: block.cols(),
                    m3: dims.m3,
                });
            }
            if !block.is_finite() {
                return Err(Error::NonFinite { row: idx, col: 0 });
            }
        }
        Ok(BlockTbtSpec {
            dims,
            class,
            coeffs,
        })
    }

    pub fn dims(&self) -> DimTriple {
        self.dims
    }

    pub fn class(&self) -> StructureClass {
        self.class
    }

    fn idx(&self, r: i64, s: i64) -> usize {
        let m1 = self.dims.m1 as i64;
        let m2 = self.dims.m2 as i64;
        assert!(
            r.abs() < m1 && s.abs() < m2,
            "coefficient index out of range"
        );
        ((r + m1 - 1) * (2 * m2 - 1) + (s + m2 - 1)) as usize
    }

    /// Coefficient block t_s^(r).
    pub fn coeff(&self, r: i64, s: i64) -> &ComplexMatrix {
        &self.coeffs[self.idx(r, s)]
    }

    pub fn coeff_mut(&mut self, r: i64, s: i64) -> &mut ComplexMatrix {
        let idx = self.idx(r, s);
        &mut self.coeffs[idx]
    }

    pub fn coeff_blocks(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|b| b.norm_max()).fold(0.0, f64::max)
    }

    /// The outer coefficient: the m2*m3 square Toeplitz-of-blocks matrix
    /// with block (i, k) equal to t_{i-k}^(r).
    pub fn outer_block(&self, r: i64) -> ComplexMatrix {
        let m2 = self.dims.m2;
        let m3 = self.dims.m3;
        let mut out = ComplexMatrix::zeros(m2 * m3, m2 * m3);
        for i in 0..m2 {
            for k in 0..m2 {
                out.set_block(i * m3, k * m3, self.coeff(r, i as i64 - k as i64));
            }
        }
        out
    }

    /// Dense m x m assembly: outer block (i, k) is the outer coefficient at
    /// i - k, whose inner block (i', k') is t_{i'-k'}^(i-k).
    pub fn assemble(&self) -> ComplexMatrix {
        let DimTriple { m1, m2, m3 } = self.dims;
        let mm = self.dims.m();
        let mut out = ComplexMatrix::zeros(mm, mm);
        for i in 0..m1 {
            for k in 0..m1 {
                let r = i as i64 - k as i64;
                for ii in 0..m2 {
                    for kk in 0..m2 {
                        let s = ii as i64 - kk as i64;
                        out.set_block((i * m2 + ii) * m3, (k * m2 + kk) * m3, self.coeff(r, s));
                    }
                }
            }
        }
        out
    }

    /// Adds `shift * I` to the central block t_0^(0); a real shift preserves
    /// membership in all four classes.
    pub fn shift_central(&mut self, shift: f64) {
        let m3 = self.dims.m3;
        let block = self.coeff_mut(0, 0);
        for d in 0..m3 {
            block[(d, d)] += cplx(shift, 0.0);
        }
    }
}

/// Scalar generating coefficients of a 3-D Toeplitz structure, stored
/// densely at index (r + m1 - 1, s + m2 - 1, j + m3 - 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Toeplitz3dSpec {
    dims: DimTriple,
    taus: Vec<Complex64>,
}

impl Toeplitz3dSpec {
    pub fn new(dims: DimTriple, taus: Vec<Complex64>) -> Result<Self> {
        let want = (2 * dims.m1 - 1) * (2 * dims.m2 - 1) * (2 * dims.m3 - 1);
        if taus.len() != want {
            return Err(Error::SpecIncomplete {
                have: taus.len(),
                want,
            });
        }
        for (idx, t) in taus.iter().enumerate() {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::NonFinite { row: idx, col: 0 });
            }
        }
        Ok(Toeplitz3dSpec { dims, taus })
    }

    pub fn dims(&self) -> DimTriple {
        self.dims
    }

    fn idx(&self, r: i64, s: i64, j: i64) -> usize {
        let m1 = self.dims.m1 as i64;
        let m2 = self.dims.m2 as i64;
        let m3 = self.dims.m3 as i64;
        assert!(
            r.abs() < m1 && s.abs() < m2 && j.abs() < m3,
            "tau index out of range"
        );
        (((r + m1 - 1) * (2 * m2 - 1) + (s + m2 - 1)) * (2 * m3 - 1) + (j + m3 - 1)) as usize
    }

    pub fn tau(&self, r: i64, s: i64, j: i64) -> Complex64 {
        self.taus[self.idx(r, s, j)]
    }

    pub fn taus(&self) -> &[Complex64] {
        &self.taus
    }

    /// Expands each scalar diagonal family into its m3 x m3 Toeplitz block,
    /// yielding the equivalent block spec.
    pub fn lift(&self) -> BlockTbtSpec {
        let DimTriple { m1, m2, m3 } = self.dims;
        let mut coeffs = Vec::with_capacity((2 * m1 - 1) * (2 * m2 - 1));
        for r in -(m1 as i64 - 1)..=(m1 as i64 - 1) {
            for s in -(m2 as i64 - 1)..=(m2 as i64 - 1) {
                coeffs.push(ComplexMatrix::from_fn(m3, m3, |a, b| {
                    self.tau(r, s, a as i64 - b as i64)
                }));
            }
        }
        BlockTbtSpec {
            dims: self.dims,
            class: StructureClass::Toeplitz3d,
            coeffs,
        }
    }
}

/// Anti-identity of order n (ones on the anti-diagonal).
pub fn anti_identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// The per-level exchange matrices and their Kronecker product.
#[derive(Debug, Clone)]
pub struct ExchangeSet {
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub u3: ComplexMatrix,
    pub u: ComplexMatrix,
}

impl ExchangeSet {
    pub fn new(dims: DimTriple) -> Self {
        let u1 = anti_identity(dims.m1);
        let u2 = anti_identity(dims.m2);
        let u3 = anti_identity(dims.m3);
        let u = u1.kron(&u2).kron(&u3);
        ExchangeSet { u1, u2, u3, u }
    }

    pub fn level(&self, p: usize) -> Result<&ComplexMatrix> {
        match p {
            1 => Ok(&self.u1),
            2 => Ok(&self.u2),
            3 => Ok(&self.u3),
            _ => Err(Error::BadAxis { p }),
        }
    }
}

/// Spec whose assembly is the identity matrix: t_0^(0) = I, all else zero.
pub fn identity_spec(dims: DimTriple) -> BlockTbtSpec {
    let blocks = (2 * dims.m1 - 1) * (2 * dims.m2 - 1);
    let mut coeffs = vec![ComplexMatrix::zeros(dims.m3, dims.m3); blocks];
    let central = (dims.m1 - 1) * (2 * dims.m2 - 1) + (dims.m2 - 1);
    coeffs[central] = ComplexMatrix::identity(dims.m3);
    BlockTbtSpec {
        dims,
        class: StructureClass::General,
        coeffs,
    }
}

fn random_block(rng: &mut XorShift64Star, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| cplx(rng.next_unit(), rng.next_unit()))
}

/// Random scalar coefficients for a 3-D Toeplitz structure. Draw order is
/// (r, s, j) lexicographic, real part before imaginary part.
pub fn random_spec3(dims: DimTriple, seed: u64, shift: Option<f64>) -> Toeplitz3dSpec {
    let mut rng = XorShift64Star::new(seed);
    let count = (2 * dims.m1 - 1) * (2 * dims.m2 - 1) * (2 * dims.m3 - 1);
    let mut taus: Vec<Complex64> = (0..count)
        .map(|_| cplx(rng.next_unit(), rng.next_unit()))
        .collect();
    let maxabs = taus.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let shift = shift.unwrap_or(2.0 * dims.m() as f64 * maxabs);
    let central =
        ((dims.m1 - 1) * (2 * dims.m2 - 1) + (dims.m2 - 1)) * (2 * dims.m3 - 1) + (dims.m3 - 1);
    taus[central] += cplx(shift, 0.0);
    Toeplitz3dSpec { dims, taus }
}

/// Deterministic random spec of the requested class.
///
/// Entries are drawn uniformly on [-1, 1) for both parts, blocks in (r, s)
/// lexicographic order and row-major within a block. The class projection
/// then lands exactly in the class:
/// - DSTU: t <- (t + U3 t^T U3) / 2 for every block;
/// - self-adjoint: blocks with r > 0, or r = 0 and s >= 0, are drawn and the
///   rest mirrored as t_{-s}^(-r) = (t_s^(r))^*, with the central block
///   averaged against its own conjugate transpose;
/// - 3-D Toeplitz: scalar coefficients are drawn and lifted.
///
/// `shift` (default 2 * m * max coefficient modulus, enough for strict
/// diagonal dominance) is finally added to the central block as shift * I.
pub fn random_spec(
    dims: DimTriple,
    seed: u64,
    class: StructureClass,
    shift: Option<f64>,
) -> BlockTbtSpec {
    if class == StructureClass::Toeplitz3d {
        return random_spec3(dims, seed, shift).lift();
    }

    let mut rng = XorShift64Star::new(seed);
    let m1 = dims.m1 as i64;
    let m2 = dims.m2 as i64;
    let blocks = ((2 * m1 - 1) * (2 * m2 - 1)) as usize;
    let mut coeffs = vec![ComplexMatrix::zeros(dims.m3, dims.m3); blocks];
    let span = (2 * m2 - 1) as usize;
    let at = |r: i64, s: i64| ((r + m1 - 1) as usize) * span + (s + m2 - 1) as usize;

    match class {
        StructureClass::General => {
            for slot in coeffs.iter_mut() {
                *slot = random_block(&mut rng, dims.m3);
            }
        }
        StructureClass::Dstu => {
            let u3 = anti_identity(dims.m3);
            for slot in coeffs.iter_mut() {
                let t = random_block(&mut rng, dims.m3);
                let mirrored = &u3 * &t.transpose() * &u3;
                *slot = (&t + &mirrored).scale(cplx(0.5, 0.0));
            }
        }
        StructureClass::SelfAdjoint => {
            for r in -(m1 - 1)..=(m1 - 1) {
                for s in -(m2 - 1)..=(m2 - 1) {
                    if r > 0 || (r == 0 && s >= 0) {
                        coeffs[at(r, s)] = random_block(&mut rng, dims.m3);
                    }
                }
            }
            for r in -(m1 - 1)..=(m1 - 1) {
                for s in -(m2 - 1)..=(m2 - 1) {
                    if !(r > 0 || (r == 0 && s >= 0)) {
                        coeffs[at(r, s)] = coeffs[at(-r, -s)].conj_transpose();
                    }
                }
            }
            let central = coeffs[at(0, 0)].clone();
            coeffs[at(0, 0)] = (&central + &central.conj_transpose()).scale(cplx(0.5, 0.0));
        }
        StructureClass::Toeplitz3d => unreachable!(),
    }

    let mut spec = BlockTbtSpec {
        dims,
        class,
        coeffs,
    };
    let shift = shift.unwrap_or(2.0 * dims.m() as f64 * spec.max_coeff_modulus());
    spec.shift_central(shift);
    spec
}

/// Residuals of each structure property, each to be compared against
/// `tol = 1e-13 * max coefficient modulus`.
#[derive(Debug, Clone, Copy)]
pub struct StructureCheck {
    pub self_adjoint: f64,
    pub dstu: f64,
    pub toeplitz_blocks: f64,
    pub tol: f64,
}

impl StructureCheck {
    pub fn satisfies(&self, class: StructureClass) -> bool {
        match class {
            StructureClass::General => true,
            StructureClass::SelfAdjoint => self.self_adjoint <= self.tol,
            StructureClass::Dstu => self.dstu <= self.tol,
            StructureClass::Toeplitz3d => self.toeplitz_blocks <= self.tol,
        }
    }

    pub fn classes(&self) -> Vec<StructureClass> {
        StructureClass::ALL
            .iter()
            .copied()
            .filter(|c| *c != StructureClass::General && self.satisfies(*c))
            .collect()
    }
}

/// Reports which structure classes the coefficients satisfy:
/// self-adjointness via the mirrored-conjugate coefficient relation, DSTU
/// via exchange-conjugation equals transpose, 3-D via per-block Toeplitz.
pub fn structure_check(spec: &BlockTbtSpec) -> StructureCheck {
    let dims = spec.dims;
    let m1 = dims.m1 as i64;
    let m2 = dims.m2 as i64;
    let u3 = anti_identity(dims.m3);

    let mut sa = 0.0f64;
    let mut dstu = 0.0f64;
    let mut toe = 0.0f64;
    for r in -(m1 - 1)..=(m1 - 1) {
        for s in -(m2 - 1)..=(m2 - 1) {
            let t = spec.coeff(r, s);
            sa = sa.max(max_abs_diff(&t.conj_transpose(), spec.coeff(-r, -s)));
            dstu = dstu.max(max_abs_diff(&(&u3 * t * &u3), &t.transpose()));
            for a in 1..dims.m3 {
                for b in 1..dims.m3 {
                    toe = toe.max((t[(a, b)] - t[(a - 1, b - 1)]).norm());
                }
            }
        }
    }
    StructureCheck {
        self_adjoint: sa,
        dstu,
        toeplitz_blocks: toe,
        tol: 1e-13 * spec.max_coeff_modulus(),
    }
}
