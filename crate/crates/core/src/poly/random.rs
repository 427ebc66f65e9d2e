use rand::Rng;
use rand_distr::StandardNormal;

use super::{monomials_up_to, RealPoly, VariableLayout};

/// Dense polynomial of degree `<= max_degree` with standard normal coefficients.
pub fn random_poly<R: Rng + ?Sized>(layout: &VariableLayout, max_degree: usize, rng: &mut R) -> RealPoly {
    let terms = monomials_up_to(layout.total_dim(), max_degree)
        .into_iter()
        .map(|m| (m, rng.sample::<f64, _>(StandardNormal)));
    RealPoly::from_terms(layout, terms).expect("monomials match layout")
}
