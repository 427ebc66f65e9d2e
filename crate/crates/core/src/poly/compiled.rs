use super::RealPoly;

/// Flat real polynomial for repeated evaluation at many points.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    nvars: usize,
    max_exp: usize,
    coeffs: Vec<f64>,
    factors: Vec<Vec<(usize, usize)>>,
}

impl CompiledPoly {
    pub fn new(p: &RealPoly) -> Self {
        let mut max_exp = 0;
        let mut coeffs = Vec::with_capacity(p.num_terms());
        let mut factors = Vec::with_capacity(p.num_terms());
        for (m, &c) in p.terms() {
            let f: Vec<(usize, usize)> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e as usize))
                .collect();
            max_exp = f.iter().map(|&(_, e)| e).max().unwrap_or(0).max(max_exp);
            coeffs.push(c);
            factors.push(f);
        }
        Self { nvars: p.nvars(), max_exp, coeffs, factors }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        if self.max_exp <= 1 {
            return self
                .coeffs
                .iter()
                .zip(&self.factors)
                .map(|(c, f)| c * f.iter().map(|&(i, _)| x[i]).product::<f64>())
                .sum();
        }
        let w = self.max_exp + 1;
        let mut pows = vec![1.0; self.nvars * w];
        for (i, &xi) in x.iter().enumerate() {
            for e in 1..w {
                pows[i * w + e] = pows[i * w + e - 1] * xi;
            }
        }
        self.coeffs
            .iter()
            .zip(&self.factors)
            .map(|(c, f)| c * f.iter().map(|&(i, e)| pows[i * w + e]).product::<f64>())
            .sum()
    }
}

/// Value and symbolic gradient of a real polynomial.
#[derive(Debug, Clone)]
pub struct CompiledGradient {
    value: CompiledPoly,
    partials: Vec<CompiledPoly>,
}

impl CompiledGradient {
    pub fn new(p: &RealPoly) -> Self {
        let partials = (0..p.nvars()).map(|i| CompiledPoly::new(&p.partial(i))).collect();
        Self { value: CompiledPoly::new(p), partials }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.value.eval(x)
    }

    pub fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for (g, d) in grad.iter_mut().zip(&self.partials) {
            *g = d.eval(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VariableLayout;

    #[test]
    fn matches_direct_evaluation() {
        let l = VariableLayout::single(3);
        let x0 = RealPoly::var(&l, 0);
        let x2 = RealPoly::var(&l, 2);
        let p = &(&x0.pow(3) * &x2) - &x2.scale(2.0);
        let c = CompiledGradient::new(&p);
        let pt = [0.3, -1.2, 0.7];
        assert!((c.eval(&pt) - p.eval(&pt)).abs() < 1e-15);
        let mut g = [0.0; 3];
        c.gradient(&pt, &mut g);
        assert!((g[0] - 3.0 * 0.09 * 0.7).abs() < 1e-14);
        assert_eq!(g[1], 0.0);
        assert!((g[2] - (0.027 - 2.0)).abs() < 1e-14);
    }
}
