//! Harmonic decompositions of polynomials restricted to spheres and sphere
//! products, and sampling estimates of the harmonic constant.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ortho::{gegenbauer_all, gegenbauer_value_at_one, OrthoError};
use crate::poly::{random_poly, sup_norm_estimate, PolyError, RealPoly, VariableLayout};
use crate::set::SetDescriptor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error("block `{0}` has dimension {1}; need at least 2")]
    BlockTooSmall(String, usize),
    #[error("decomposition residual {0:e} exceeds tolerance")]
    Inconsistent(f64),
}

const RESIDUAL_TOL: f64 = 1e-8;

/// Components keyed by per-block harmonic degree. Each component is
/// homogeneous and harmonic in every decomposed block, and their sum agrees
/// with the input on the sphere product.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicDecomposition {
    pub blocks: Vec<String>,
    pub components: BTreeMap<Vec<usize>, RealPoly>,
}

impl HarmonicDecomposition {
    pub fn block_degrees(&self) -> Vec<Vec<usize>> {
        self.components.keys().cloned().collect()
    }

    pub fn component(&self, key: &[usize]) -> Option<&RealPoly> {
        self.components.get(key)
    }

    pub fn sum(&self, layout: &VariableLayout) -> RealPoly {
        self.components.values().fold(RealPoly::zero(layout), |acc, c| &acc + c)
    }

    /// `sum_kappa w(kappa) q_kappa`.
    pub fn weighted_sum(&self, layout: &VariableLayout, mut w: impl FnMut(&[usize]) -> f64) -> RealPoly {
        let mut acc = RealPoly::zero(layout);
        for (k, c) in &self.components {
            acc = &acc + &c.scale(w(k));
        }
        acc
    }
}

/// `prod_{i=1}^{j} 2i (2k + n + 2i - 2)`, the factor with
/// `Lap^j (|x|^{2j} h) = factor * h` for `h` harmonic of degree `k` in `R^n`.
fn laplacian_power_factor(n: usize, k: usize, j: usize) -> f64 {
    (1..=j).map(|i| (2 * i * (2 * k + n + 2 * i - 2)) as f64).product()
}

/// Splits a polynomial into pieces harmonic in the variables `range`,
/// keyed by harmonic degree, equal to the input once `|x|^2 = 1` on that block.
fn decompose_range(p: &RealPoly, block: usize) -> Result<BTreeMap<usize, RealPoly>, HarmonicError> {
    let layout = p.layout().clone();
    let range = layout.range(block);
    let n = range.len();
    let r2 = RealPoly::block_norm_sq(&layout, block);
    let scale = p.max_abs_coeff().max(1.0);
    let mut out: BTreeMap<usize, RealPoly> = BTreeMap::new();
    for deg in 0..=p.block_degree(block) {
        let slice = p.slice_by_block_degree(range.clone(), deg);
        if slice.is_zero() {
            continue;
        }
        let jmax = deg / 2;
        let mut parts: Vec<RealPoly> = vec![RealPoly::zero(&layout); jmax + 1];
        let mut r2_pows: Vec<RealPoly> = vec![RealPoly::constant(&layout, 1.0)];
        for j in 1..=jmax {
            let next = &r2_pows[j - 1] * &r2;
            r2_pows.push(next);
        }
        for j in (0..=jmax).rev() {
            let mut rest = slice.clone();
            for jj in j + 1..=jmax {
                rest = &rest - &(&r2_pows[jj] * &parts[jj]);
            }
            let mut lap = rest;
            for _ in 0..j {
                lap = lap.laplacian_range(range.clone());
            }
            parts[j] = lap.scale(1.0 / laplacian_power_factor(n, deg - 2 * j, j));
        }
        let mut residual = slice.clone();
        for (j, h) in parts.iter().enumerate() {
            residual = &residual - &(&r2_pows[j] * h);
            let lap = h.laplacian_range(range.clone()).max_abs_coeff();
            if lap > RESIDUAL_TOL * scale {
                return Err(HarmonicError::Inconsistent(lap));
            }
        }
        let res = residual.max_abs_coeff();
        if res > RESIDUAL_TOL * scale {
            return Err(HarmonicError::Inconsistent(res));
        }
        for (j, h) in parts.into_iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let k = deg - 2 * j;
            let entry = out.entry(k).or_insert_with(|| RealPoly::zero(&layout));
            *entry = &*entry + &h;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn check_block(layout: &VariableLayout, i: usize) -> Result<(), HarmonicError> {
    let b = &layout.blocks()[i];
    if b.dim < 2 {
        return Err(HarmonicError::BlockTooSmall(b.name.clone(), b.dim));
    }
    Ok(())
}

/// Harmonic decomposition with respect to the variables of one block; other
/// variables are carried along as coefficients.
pub fn harmonic_decompose_block(p: &RealPoly, block: &str) -> Result<HarmonicDecomposition, HarmonicError> {
    let i = p.layout().block_index(block)?;
    check_block(p.layout(), i)?;
    let parts = decompose_range(p, i)?;
    Ok(HarmonicDecomposition {
        blocks: vec![block.to_string()],
        components: parts.into_iter().map(|(k, c)| (vec![k], c)).collect(),
    })
}

/// Decomposition over every block of `layout`, applied block by block.
pub fn multigrade_decompose(q: &RealPoly, layout: &VariableLayout) -> Result<HarmonicDecomposition, HarmonicError> {
    if q.layout() != layout {
        return Err(PolyError::LayoutMismatch.into());
    }
    for i in 0..layout.num_blocks() {
        check_block(layout, i)?;
    }
    let mut current: BTreeMap<Vec<usize>, RealPoly> = BTreeMap::new();
    current.insert(vec![], q.clone());
    for i in 0..layout.num_blocks() {
        let mut next = BTreeMap::new();
        for (key, c) in current {
            for (k, part) in decompose_range(&c, i)? {
                let mut kk = key.clone();
                kk.push(k);
                next.insert(kk, part);
            }
        }
        current = next;
    }
    Ok(HarmonicDecomposition {
        blocks: layout.blocks().iter().map(|b| b.name.clone()).collect(),
        components: current,
    })
}

/// Degree-`k` zonal projection of `p` at `x` on the sphere in `R^n`:
/// `sum_j w_j G_k(x . z_j) p(z_j)` over a cubature `(z_j, w_j)` of the
/// uniform probability measure. Exact when the cubature integrates degree
/// `k + deg p` polynomials exactly.
pub fn zonal_projection(p: &RealPoly, k: usize, x: &[f64], cubature: &[(Vec<f64>, f64)]) -> Result<f64, HarmonicError> {
    let n = x.len();
    let mut acc = 0.0;
    for (z, w) in cubature {
        let dot: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
        let g = gegenbauer_all(n, k, dot.clamp(-1.0, 1.0))?[k];
        acc += w * g * p.evaluate(z)?;
    }
    Ok(acc)
}

/// Sampling estimate of the harmonic constant next to its provable bound.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HarmonicConstantReport {
    pub n: usize,
    pub d: usize,
    pub empirical_gamma: f64,
    pub upper_bound: f64,
}

/// `sqrt(max_{k <= d} dim H_k)`, which bounds the harmonic constant.
pub fn harmonic_constant_bound(n: usize, d: usize) -> Result<f64, HarmonicError> {
    let mut m: f64 = 1.0;
    for k in 0..=d {
        m = m.max(gegenbauer_value_at_one(n, k)?);
    }
    Ok(m.sqrt())
}

const NORM_SAMPLES: usize = 2000;

/// Largest observed ratio `|p_k|_sup / |p|_sup` over `trials` random
/// polynomials of degree `d` on the sphere in `R^n`.
pub fn harmonic_constant_estimate(n: usize, d: usize, trials: usize, seed: u64) -> Result<HarmonicConstantReport, HarmonicError> {
    let upper_bound = harmonic_constant_bound(n, d)?;
    let layout = VariableLayout::single(n);
    let set = SetDescriptor::sphere_product(1, n).map_err(|e| PolyError::UnsupportedSet(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma: f64 = if d == 0 { 1.0 } else { 0.0 };
    for trial in 0..trials.max(1) {
        if d == 0 {
            break;
        }
        let p = random_poly(&layout, d, &mut rng);
        let base = sup_norm_estimate(&p, &set, NORM_SAMPLES, seed ^ ((trial as u64) << 20))?.value;
        if base <= 0.0 {
            continue;
        }
        let dec = harmonic_decompose_block(&p, "x")?;
        for (k, c) in &dec.components {
            let v = sup_norm_estimate(c, &set, NORM_SAMPLES, seed ^ ((trial as u64) << 20) ^ (k[0] as u64 + 1))?.value;
            gamma = gamma.max(v / base);
        }
    }
    Ok(HarmonicConstantReport { n, d, empirical_gamma: gamma, upper_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    fn poly(layout: &VariableLayout, terms: &[(&[u16], f64)]) -> RealPoly {
        RealPoly::from_terms(layout, terms.iter().map(|(e, c)| (Monomial::from_exponents(e.to_vec()), *c))).unwrap()
    }

    #[test]
    fn square_of_coordinate() {
        let l = VariableLayout::single(3);
        let p = poly(&l, &[(&[2, 0, 0], 1.0)]);
        let dec = harmonic_decompose_block(&p, "x").unwrap();
        let h2 = poly(&l, &[(&[2, 0, 0], 2.0 / 3.0), (&[0, 2, 0], -1.0 / 3.0), (&[0, 0, 2], -1.0 / 3.0)]);
        assert!((dec.component(&[2]).unwrap() - &h2).max_abs_coeff() < 1e-14);
        assert!((dec.component(&[0]).unwrap() - &RealPoly::constant(&l, 1.0 / 3.0)).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn harmonic_input_is_single_component() {
        let l = VariableLayout::single(3);
        let p = poly(&l, &[(&[1, 1, 0], 1.0)]);
        let dec = harmonic_decompose_block(&p, "x").unwrap();
        assert_eq!(dec.block_degrees(), vec![vec![2]]);
        assert_eq!(dec.component(&[2]).unwrap(), &p);
    }

    #[test]
    fn norm_square_reduces_to_constant() {
        let l = VariableLayout::single(4);
        let p = RealPoly::block_norm_sq(&l, 0);
        let dec = harmonic_decompose_block(&p, "x").unwrap();
        assert_eq!(dec.block_degrees(), vec![vec![0]]);
        assert!((dec.component(&[0]).unwrap() - &RealPoly::constant(&l, 1.0)).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn bilinear_and_product_norms() {
        let l = VariableLayout::bipartite(3);
        let xy = poly(&l, &[(&[1, 0, 0, 1, 0, 0], 1.0), (&[0, 1, 0, 0, 1, 0], 1.0), (&[0, 0, 1, 0, 0, 1], 1.0)]);
        let dec = multigrade_decompose(&xy, &l).unwrap();
        assert_eq!(dec.block_degrees(), vec![vec![1, 1]]);
        let nn = &RealPoly::block_norm_sq(&l, 0) * &RealPoly::block_norm_sq(&l, 1);
        let dec = multigrade_decompose(&nn, &l).unwrap();
        assert_eq!(dec.block_degrees(), vec![vec![0, 0]]);
    }

    #[test]
    fn mixed_example() {
        let l = VariableLayout::bipartite(3);
        let q = poly(&l, &[(&[2, 0, 0, 1, 0, 0], 1.0)]);
        let dec = multigrade_decompose(&q, &l).unwrap();
        assert_eq!(dec.block_degrees(), vec![vec![0, 1], vec![2, 1]]);
        let low = poly(&l, &[(&[0, 0, 0, 1, 0, 0], 1.0 / 3.0)]);
        assert!((dec.component(&[0, 1]).unwrap() - &low).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn rejects_one_dimensional_block() {
        let l = VariableLayout::new([("x", 1usize)]).unwrap();
        let p = RealPoly::var(&l, 0);
        assert!(matches!(harmonic_decompose_block(&p, "x"), Err(HarmonicError::BlockTooSmall(..))));
    }

    #[test]
    fn constant_bound_values() {
        assert!((harmonic_constant_bound(3, 2).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        let r = harmonic_constant_estimate(3, 0, 3, 1).unwrap();
        assert_eq!(r.empirical_gamma, 1.0);
        let r = harmonic_constant_estimate(3, 3, 4, 7).unwrap();
        assert!(r.empirical_gamma > 0.0 && r.empirical_gamma <= r.upper_bound, "{r:?}");
    }
}
