//! Univariate orthogonal families: zonal Gegenbauer polynomials, Chebyshev
//! polynomials and matching quadrature.

mod chebyshev;
mod gegenbauer;
mod quadrature;

pub use chebyshev::chebyshev_eval;
pub use gegenbauer::{gegenbauer_all, gegenbauer_eval, gegenbauer_value_at_one, harmonic_dimension};
pub use quadrature::{
    expansion_operators, gauss_gegenbauer, gauss_legendre, gram_coefficients, s2_product_rule, GaussRule, GramBasis,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrthoError {
    #[error("sphere dimension n = {0} is too small (need n >= 3)")]
    DimensionTooSmall(usize),
    #[error("argument {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("Gram matrix must be square and nonempty, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
}
