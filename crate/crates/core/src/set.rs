//! Feasible sets: products of unit spheres and the hypercube.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{CompiledGradient, VariableLayout};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("unsupported set descriptor `{0}` (expected `sphere<M>x<N>` or `cube<N>`)")]
    Unsupported(String),
    #[error("layout does not match {set}: {reason}")]
    LayoutMismatch { set: String, reason: String },
}

/// `SphereProduct { m, n }` is `S^{n-1} x ... x S^{n-1}` (m factors) in `R^{mn}`;
/// `Hypercube { n }` is `[-1, 1]^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescriptor {
    SphereProduct { m: usize, n: usize },
    Hypercube { n: usize },
}

impl SetDescriptor {
    pub fn sphere_product(m: usize, n: usize) -> Result<Self, SetError> {
        if m == 0 || n < 2 {
            return Err(SetError::Unsupported(format!("sphere{m}x{n}")));
        }
        Ok(SetDescriptor::SphereProduct { m, n })
    }

    pub fn hypercube(n: usize) -> Result<Self, SetError> {
        if n == 0 {
            return Err(SetError::Unsupported("cube0".into()));
        }
        Ok(SetDescriptor::Hypercube { n })
    }

    pub fn dim(&self) -> usize {
        match *self {
            SetDescriptor::SphereProduct { m, n } => m * n,
            SetDescriptor::Hypercube { n } => n,
        }
    }

    /// Default layout: `x` for one sphere, `x, y` for two, `x1..xm` otherwise; `x` for the cube.
    pub fn layout(&self) -> VariableLayout {
        match *self {
            SetDescriptor::SphereProduct { m: 1, n } => VariableLayout::single(n),
            SetDescriptor::SphereProduct { m: 2, n } => VariableLayout::bipartite(n),
            SetDescriptor::SphereProduct { m, n } => VariableLayout::uniform(m, n),
            SetDescriptor::Hypercube { n } => VariableLayout::single(n),
        }
    }

    /// Variable ranges constrained to unit spheres (empty for the cube).
    pub fn sphere_ranges(&self) -> Vec<std::ops::Range<usize>> {
        match *self {
            SetDescriptor::SphereProduct { m, n } => (0..m).map(|i| i * n..(i + 1) * n).collect(),
            SetDescriptor::Hypercube { .. } => Vec::new(),
        }
    }

    /// Sphere products need one layout block per sphere of the right dimension.
    pub fn check_layout(&self, layout: &VariableLayout) -> Result<(), SetError> {
        let mismatch = |reason: String| SetError::LayoutMismatch { set: self.to_string(), reason };
        match *self {
            SetDescriptor::SphereProduct { m, n } => {
                if layout.num_blocks() != m {
                    return Err(mismatch(format!("{} blocks, expected {m}", layout.num_blocks())));
                }
                if let Some(b) = layout.blocks().iter().find(|b| b.dim != n) {
                    return Err(mismatch(format!("block `{}` has dimension {}, expected {n}", b.name, b.dim)));
                }
            }
            SetDescriptor::Hypercube { n } => {
                if layout.total_dim() != n {
                    return Err(mismatch(format!("{} variables, expected {n}", layout.total_dim())));
                }
            }
        }
        Ok(())
    }

    /// Uniform sample: Haar on each sphere, Lebesgue on the cube.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            SetDescriptor::SphereProduct { .. } => {
                for v in out.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                self.project(out);
            }
            SetDescriptor::Hypercube { .. } => {
                for v in out.iter_mut() {
                    *v = rng.random_range(-1.0..=1.0);
                }
            }
        }
    }

    /// Nearest point of the set (per-block normalization or coordinate clamp).
    pub fn project(&self, x: &mut [f64]) {
        match *self {
            SetDescriptor::SphereProduct { .. } => {
                for r in self.sphere_ranges() {
                    let block = &mut x[r];
                    let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        block.iter_mut().for_each(|v| *v /= norm);
                    } else {
                        block[0] = 1.0;
                    }
                }
            }
            SetDescriptor::Hypercube { .. } => {
                x.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
            }
        }
    }

    /// Largest constraint violation at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        match *self {
            SetDescriptor::SphereProduct { .. } => self
                .sphere_ranges()
                .into_iter()
                .map(|r| (x[r].iter().map(|v| v * v).sum::<f64>() - 1.0).abs())
                .fold(0.0, f64::max),
            SetDescriptor::Hypercube { .. } => x.iter().map(|v| (v.abs() - 1.0).max(0.0)).fold(0.0, f64::max),
        }
    }

    /// Removes the normal component of `g` on each sphere block.
    fn tangent(&self, x: &[f64], g: &mut [f64]) {
        for r in self.sphere_ranges() {
            let dot: f64 = x[r.clone()].iter().zip(&g[r.clone()]).map(|(a, b)| a * b).sum();
            for i in r {
                g[i] -= dot * x[i];
            }
        }
    }

    /// Projected gradient descent with Armijo backtracking from `start`.
    /// Returns the final value and point (on the set).
    pub fn local_descent(&self, f: &CompiledGradient, start: &[f64], iters: usize, step0: f64) -> (f64, Vec<f64>) {
        let d = self.descend(f, start, iters, step0);
        (d.value, d.point)
    }

    /// As [`Self::local_descent`], also reporting whether a stationary point
    /// was reached before the iteration budget ran out.
    pub fn descend(&self, f: &CompiledGradient, start: &[f64], iters: usize, step0: f64) -> Descent {
        let dim = start.len();
        let mut x = start.to_vec();
        self.project(&mut x);
        let mut fx = f.eval(&x);
        let mut g = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        let mut step = step0;
        let mut converged = false;
        for _ in 0..iters {
            f.gradient(&x, &mut g);
            self.tangent(&x, &mut g);
            let gnorm2: f64 = g.iter().map(|v| v * v).sum();
            if gnorm2 < 1e-28 {
                converged = true;
                break;
            }
            let mut accepted = false;
            while step > 1e-14 {
                for i in 0..dim {
                    trial[i] = x[i] - step * g[i];
                }
                self.project(&mut trial);
                let decrease: f64 = g.iter().zip(trial.iter().zip(&x)).map(|(gi, (t, xi))| gi * (t - xi)).sum();
                let ft = f.eval(&trial);
                if decrease < 0.0 && ft <= fx + 1e-4 * decrease {
                    std::mem::swap(&mut x, &mut trial);
                    fx = ft;
                    accepted = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                converged = true;
                break;
            }
        }
        Descent { value: fx, point: x, converged }
    }
}

/// Result of [`SetDescriptor::descend`].
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub value: f64,
    pub point: Vec<f64>,
    pub converged: bool,
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SetDescriptor::SphereProduct { m, n } => write!(f, "sphere{m}x{n}"),
            SetDescriptor::Hypercube { n } => write!(f, "cube{n}"),
        }
    }
}

impl FromStr for SetDescriptor {
    type Err = SetError;

    /// `sphere<M>x<N>`: M copies of the unit sphere in R^N. `cube<N>`: [-1,1]^N.
    fn from_str(s: &str) -> Result<Self, SetError> {
        let bad = || SetError::Unsupported(s.to_string());
        if let Some(rest) = s.strip_prefix("sphere") {
            let (m, n) = rest.split_once('x').ok_or_else(bad)?;
            let m: usize = m.parse().map_err(|_| bad())?;
            let n: usize = n.parse().map_err(|_| bad())?;
            return Self::sphere_product(m, n).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix("cube") {
            let n: usize = rest.parse().map_err(|_| bad())?;
            return Self::hypercube(n).map_err(|_| bad());
        }
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RealPoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parses_grammar() {
        assert_eq!("sphere2x3".parse::<SetDescriptor>().unwrap(), SetDescriptor::SphereProduct { m: 2, n: 3 });
        assert_eq!("cube4".parse::<SetDescriptor>().unwrap(), SetDescriptor::Hypercube { n: 4 });
        for bad in ["sphere2", "sphere0x3", "sphere2x1", "ball3", "cube", "cube0"] {
            assert!(bad.parse::<SetDescriptor>().is_err(), "{bad}");
        }
        assert_eq!(SetDescriptor::SphereProduct { m: 3, n: 4 }.to_string(), "sphere3x4");
    }

    #[test]
    fn samples_lie_on_the_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = SetDescriptor::SphereProduct { m: 2, n: 3 };
        let mut x = vec![0.0; 6];
        for _ in 0..50 {
            s.sample(&mut rng, &mut x);
            assert!(s.violation(&x) < 1e-12);
        }
        let c = SetDescriptor::Hypercube { n: 3 };
        let mut y = vec![0.0; 3];
        c.sample(&mut rng, &mut y);
        assert_eq!(c.violation(&y), 0.0);
    }

    #[test]
    fn layout_checks() {
        let s = SetDescriptor::SphereProduct { m: 2, n: 3 };
        assert!(s.check_layout(&VariableLayout::bipartite(3)).is_ok());
        assert!(s.check_layout(&VariableLayout::single(6)).is_err());
        assert!(SetDescriptor::Hypercube { n: 6 }.check_layout(&VariableLayout::bipartite(3)).is_ok());
    }

    #[test]
    fn descent_finds_coordinate_minimum() {
        let s = SetDescriptor::SphereProduct { m: 1, n: 3 };
        let p = RealPoly::var(&s.layout(), 0);
        let f = CompiledGradient::new(&p);
        let (v, x) = s.local_descent(&f, &[0.2, 0.5, -0.3], 500, 0.1);
        assert!((v + 1.0).abs() < 1e-10);
        assert!(s.violation(&x) < 1e-12);
    }
}
