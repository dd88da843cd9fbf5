//! Error exponents for probabilistic multipartite state transformations built
//! from tensor degenerations.
//!
//! A degeneration `(A_1(z) ⊗ … ⊗ A_k(z)) ψ = φ + O(z)` turns into an SLOCC
//! protocol that maps `ψ^{⊗n}` to `φ^{⊗n}` with probability `2^{-rn + o(n)}`.
//! This crate evaluates that exponent `r` several ways: exact finite-n
//! optimizations, single-letter formulas over measures on the plane, and the
//! rate/exponent trade-off when only a fraction of the copies is converted.

pub mod degeneration;
pub mod error;
pub mod exponent;
pub mod finiten;
pub mod laurent;
pub mod linalg;
pub mod measure;
pub mod optimize;
pub mod potential;
pub mod quadrature;
pub mod state;
pub mod tradeoff;

pub use error::{Error, Result};
pub use linalg::C64;
