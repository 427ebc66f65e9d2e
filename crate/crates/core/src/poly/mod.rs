//! Sparse multivariate polynomials over variable blocks.

mod compiled;
mod json;
mod layout;
mod monomial;
mod norm;
mod polynomial;
mod random;
mod scalar;

use thiserror::Error;

pub use compiled::{CompiledGradient, CompiledPoly};
pub use json::AnyPoly;
pub use layout::{Block, VariableLayout};
pub use monomial::{binomial, monomials_of_degree, monomials_up_to, Monomial};
pub use norm::{sup_norm_estimate, SupNormEstimate};
pub use random::random_poly;
pub use polynomial::{ArithOp, ComplexPoly, Polynomial, RealPoly, CANONICAL_ZERO};
pub use scalar::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomials have different variable layouts")]
    LayoutMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
    #[error("unsupported set: {0}")]
    UnsupportedSet(String),
}
