//! Multilevel block-Toeplitz structures and their displacement-type
//! identities, with recovery of the inverse-matrix kernel and the matrix
//! reflection coefficient from a small set of constant blocks.
//!
//! The crate is organized bottom-up:
//! - [`linalg`]: dense complex matrices, Kronecker products, LU solves;
//! - [`structured`]: the four structure classes, assembly, random
//!   generation, classification, and the JSON spec format;
//! - [`identities`]: displacement operators, structured resolvents, the
//!   low-rank coupling factors, and identity residual checks;
//! - [`recovery`]: the inverse-side data, the kernel and reflection
//!   coefficient evaluators, and their reconstruction from minimal data.

pub mod error;
pub mod identities;
pub mod linalg;
pub mod recovery;
pub mod rng;
pub mod structured;

pub use error::{Error, Result};
