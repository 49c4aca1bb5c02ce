use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "dimension mismatch in {op}: left is {lhs_rows}x{lhs_cols}, right is {rhs_rows}x{rhs_cols}"
    )]
    DimensionMismatch {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular to working precision at pivot {pivot_index}")]
    SingularMatrix { pivot_index: usize },

    #[error("level sizes must all be >= 2, got ({m1}, {m2}, {m3})")]
    BadDims { m1: usize, m2: usize, m3: usize },

    #[error("coefficient table incomplete: have {have} entries, expected {want}")]
    SpecIncomplete { have: usize, want: usize },

    #[error("coefficient block at (r={r}, s={s}) is {rows}x{cols}, expected {m3}x{m3}")]
    BadBlockShape {
        r: i64,
        s: i64,
        rows: usize,
        cols: usize,
        m3: usize,
    },

    #[error("level index must be 1, 2 or 3, got {p}")]
    BadAxis { p: usize },

    #[error("third-identity data requires a 3-D Toeplitz spec, class is {class}")]
    NotThreeD { class: String },

    #[error("operation requires a DSTU or 3-D Toeplitz spec, class is {class}")]
    NotDstu { class: String },

    #[error("operation requires a self-adjoint spec, class is {class}")]
    NotSelfAdjoint { class: String },

    #[error("evaluation point {z} hits the operator spectrum")]
    PoleAtSpectrum { z: Complex64 },

    #[error("assembled matrix is not invertible (singular at pivot {pivot_index})")]
    TNotInvertible { pivot_index: usize },

    #[error("recovery system for u-hat is singular at the sample point")]
    GSingular,

    #[error("recovery system for u is singular at the sample point")]
    ESingular,

    #[error("sample pair is degenerate: lambda_{p} == mu_{p}")]
    DegenerateSamplePair { p: usize },

    #[error("Moebius map has a pole at argument 1")]
    PhiPole,

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
