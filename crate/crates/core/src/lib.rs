//! Moment-SOS relaxations for polynomial optimization over products of unit
//! spheres (and the hypercube), the polynomial kernel machinery behind their
//! `O(1/t^2)` convergence certificates, and a moment relaxation of the order-2
//! quantum Wasserstein distance.
//!
//! Module map:
//! - [`poly`]: sparse polynomials over variable blocks.
//! - [`ortho`]: Gegenbauer and Chebyshev families, Gauss quadrature.
//! - [`harmonic`]: harmonic decompositions on spheres and sphere products.
//! - [`kernel`]: perturbed Christoffel–Darboux kernels, eigenvalue synthesis, rate constants.
//! - [`conic`]: standard-form conic programs and the solver backend registry.
//! - [`moment`]: moment relaxations and hierarchy sweeps.
//! - [`qwass`]: quantum states, transport plans, and the Wasserstein relaxation.
//! - [`oracle`]: independent minimizers used to validate lower bounds.

// Links the system OpenBLAS used by the conic solver's dense kernels.
extern crate openblas_src;

pub mod conic;
pub mod harmonic;
pub mod kernel;
pub mod moment;
pub mod oracle;
pub mod ortho;
pub mod poly;
pub mod qwass;
pub mod set;

pub use poly::{Monomial, RealPoly, VariableLayout};
pub use set::{Descent, SetDescriptor};
