use num_complex::Complex64;

use crate::kernel::{self, KernelError};
use crate::oracle::{range_estimate, OracleBudget};
use crate::poly::{ComplexPoly, RealPoly, VariableLayout};
use crate::set::SetDescriptor;

use super::QwassError;

/// Blocks `a, b, c, d` of dimension `n`, with `x = a + i b` and `y = c + i d`.
pub fn real_layout(n: usize) -> VariableLayout {
    VariableLayout::new([("a", n), ("b", n), ("c", n), ("d", n)]).expect("distinct block names")
}

/// `|sum x_i^2|^2 + |sum y_i^2|^2 - 2 |sum x_i y_i|^2` after substituting
/// `x = a + i b`, `y = c + i d`; a real polynomial of degree 4 in `4n` variables.
pub fn real_objective(n: usize) -> RealPoly {
    let l = real_layout(n);
    let var = |k: usize| RealPoly::var(&l, k).to_complex();
    let i = Complex64::i();
    let x: Vec<ComplexPoly> = (0..n).map(|k| &var(k) + &var(n + k).scale(i)).collect();
    let y: Vec<ComplexPoly> = (0..n).map(|k| &var(2 * n + k) + &var(3 * n + k).scale(i)).collect();
    let dot = |p: &[ComplexPoly], q: &[ComplexPoly]| {
        p.iter().zip(q).fold(ComplexPoly::zero(&l), |acc, (a, b)| &acc + &(a * b))
    };
    let modsq = |p: ComplexPoly| &p * &p.conj_coeffs();
    let f = &(&modsq(dot(&x, &x)) + &modsq(dot(&y, &y))) - &modsq(dot(&x, &y)).scale(Complex64::new(2.0, 0.0));
    assert!(f.im().max_abs_coeff() < 1e-12, "imaginary part must cancel");
    f.re()
}

/// The same polynomial viewed on `S^{2n-1} x S^{2n-1}` (blocks `(a, b)` and `(c, d)`).
pub fn on_sphere_pair(p: &RealPoly, n: usize) -> RealPoly {
    let l = VariableLayout::bipartite(2 * n);
    RealPoly::from_terms(&l, p.terms().map(|(m, &c)| (m.clone(), c))).expect("same variable count")
}

/// Extremes of the objective on the real sphere pair.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ObjectiveRange {
    /// Over `samples` uniform points.
    pub sampled_min: f64,
    pub sampled_max: f64,
    /// Multistart local search.
    pub searched_min: f64,
    pub searched_max: f64,
}

pub fn objective_range(n: usize, samples: usize, seed: u64) -> Result<ObjectiveRange, QwassError> {
    use rand::SeedableRng;
    let f = on_sphere_pair(&real_objective(n), n);
    let set = SetDescriptor::SphereProduct { m: 2, n: 2 * n };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; 4 * n];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples {
        set.sample(&mut rng, &mut z);
        let v = f.eval(&z);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let (min, max) = range_estimate(&f, &set, OracleBudget::default(), seed)?;
    Ok(ObjectiveRange { sampled_min: lo, sampled_max: hi, searched_min: min.min_estimate, searched_max: max.min_estimate })
}

/// Error constant `(3/2)(3 + 4n) C(2n, 4)` of the Wasserstein hierarchy,
/// with the ingredients it is assembled from.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KappaBound {
    pub n: usize,
    pub value: f64,
    /// Exact integer value.
    pub exact: u128,
    /// Bi-sphere constant for dimension `2n`, degree 4.
    pub c_bisphere: u128,
    /// Maximum of the objective on the sphere pair.
    pub f_max: f64,
    /// Maximum of the constraint polynomials.
    pub h_max: f64,
    /// Bound on the 1-norm of an optimal dual vector.
    pub w_l1_bound: f64,
}

pub const F_MAX: f64 = 2.0;
pub const H_MAX: f64 = 2.0;

pub fn kappa_bound(n: usize) -> Result<KappaBound, KernelError> {
    if n < 2 {
        return Err(KernelError::InvalidParameter(format!("kappa needs n >= 2, got {n}")));
    }
    let c = kernel::c_bisphere_exact(2 * n, 4)?;
    let exact = (3 * (3 + 4 * n as u128))
        .checked_mul(c)
        .map(|v| v / 2)
        .ok_or_else(|| KernelError::Overflow("kappa".into()))?;
    Ok(KappaBound {
        n,
        value: exact as f64,
        exact,
        c_bisphere: c,
        f_max: F_MAX,
        h_max: H_MAX,
        w_l1_bound: 4.0 * n as f64,
    })
}
