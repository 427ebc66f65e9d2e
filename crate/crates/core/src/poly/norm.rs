use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CompiledGradient, CompiledPoly, PolyError, RealPoly};
use crate::set::SetDescriptor;

/// Lower estimate of `max_X |p|` with its maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEstimate {
    pub value: f64,
    pub argmax: Vec<f64>,
}

const POLISH_ITERS: usize = 500;

/// Estimates the supremum norm of `p` on `set` from `samples` uniform draws,
/// then polishes the best positive and best negative draws by projected
/// gradient ascent on `|p|`. Always a lower bound on the true value.
pub fn sup_norm_estimate(p: &RealPoly, set: &SetDescriptor, samples: usize, seed: u64) -> Result<SupNormEstimate, PolyError> {
    set.check_layout(p.layout()).map_err(|e| PolyError::UnsupportedSet(e.to_string()))?;
    let samples = samples.max(1);
    let dim = p.nvars();
    if p.degree() == 0 {
        let mut x = vec![0.0; dim];
        set.sample(&mut ChaCha8Rng::seed_from_u64(seed), &mut x);
        return Ok(SupNormEstimate { value: p.eval(&x).abs(), argmax: x });
    }
    let compiled = CompiledPoly::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dim];
    let mut best_hi = (f64::NEG_INFINITY, vec![0.0; dim]);
    let mut best_lo = (f64::INFINITY, vec![0.0; dim]);
    for _ in 0..samples {
        set.sample(&mut rng, &mut x);
        let v = compiled.eval(&x);
        if v > best_hi.0 {
            best_hi = (v, x.clone());
        }
        if v < best_lo.0 {
            best_lo = (v, x.clone());
        }
    }
    let up = CompiledGradient::new(&p.scale(-1.0));
    let down = CompiledGradient::new(p);
    let (neg_max, x_hi) = set.local_descent(&up, &best_hi.1, POLISH_ITERS, 0.1);
    let (min, x_lo) = set.local_descent(&down, &best_lo.1, POLISH_ITERS, 0.1);
    let hi = (-neg_max).max(best_hi.0);
    let lo = min.min(best_lo.0);
    let (value, argmax) = if hi.abs() >= lo.abs() {
        (hi.abs(), if -neg_max >= best_hi.0 { x_hi } else { best_hi.1 })
    } else {
        (lo.abs(), if min <= best_lo.0 { x_lo } else { best_lo.1 })
    };
    Ok(SupNormEstimate { value, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VariableLayout;

    fn dot(l: &VariableLayout, n: usize) -> RealPoly {
        (0..n).fold(RealPoly::zero(l), |acc, i| &acc + &(&RealPoly::var(l, i) * &RealPoly::var(l, n + i)))
    }

    #[test]
    fn constant_has_its_own_norm() {
        let s = SetDescriptor::SphereProduct { m: 2, n: 3 };
        let p = RealPoly::constant(&s.layout(), 1.0);
        assert_eq!(sup_norm_estimate(&p, &s, 10, 3).unwrap().value, 1.0);
    }

    #[test]
    fn inner_product_on_bisphere_reaches_one() {
        let s = SetDescriptor::SphereProduct { m: 2, n: 3 };
        let p = dot(&s.layout(), 3);
        let est = sup_norm_estimate(&p, &s, 200, 7).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);
        assert!(est.value <= 1.0 + 1e-12);
        assert!((p.eval(&est.argmax).abs() - est.value).abs() < 1e-12);
    }

    #[test]
    fn deterministic_per_seed() {
        let s = SetDescriptor::SphereProduct { m: 2, n: 3 };
        let p = &dot(&s.layout(), 3) + &RealPoly::var(&s.layout(), 0).pow(3);
        let a = sup_norm_estimate(&p, &s, 50, 11).unwrap();
        let b = sup_norm_estimate(&p, &s, 50, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_mismatched_set() {
        let p = RealPoly::var(&VariableLayout::single(3), 0);
        let s = SetDescriptor::SphereProduct { m: 2, n: 3 };
        assert!(matches!(sup_norm_estimate(&p, &s, 5, 0), Err(PolyError::UnsupportedSet(_))));
    }
}
