use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{Monomial, PolyError, Scalar, VariableLayout};

/// Coefficients with modulus below this are dropped after arithmetic.
pub const CANONICAL_ZERO: f64 = 1e-14;

/// Sparse multivariate polynomial, terms keyed by graded-lex monomials.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T: Scalar = f64> {
    layout: Arc<VariableLayout>,
    terms: BTreeMap<Monomial, T>,
}

pub type RealPoly = Polynomial<f64>;
pub type ComplexPoly = Polynomial<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(layout: &VariableLayout) -> Self {
        Self { layout: Arc::new(layout.clone()), terms: BTreeMap::new() }
    }

    fn empty_like(&self) -> Self {
        Self { layout: Arc::clone(&self.layout), terms: BTreeMap::new() }
    }

    pub fn constant(layout: &VariableLayout, c: T) -> Self {
        let mut p = Self::zero(layout);
        p.add_term(Monomial::one(layout.total_dim()), c);
        p.canonicalize();
        p
    }

    /// The variable with global index `i`.
    pub fn var(layout: &VariableLayout, i: usize) -> Self {
        let mut p = Self::zero(layout);
        p.add_term(Monomial::var(layout.total_dim(), i), T::one());
        p
    }

    /// The `i`-th variable of a named block.
    pub fn block_var(layout: &VariableLayout, block: &str, i: usize) -> Result<Self, PolyError> {
        let r = layout.range_of(block)?;
        if i >= r.len() {
            return Err(PolyError::UnknownBlock(format!("{block}[{i}]")));
        }
        Ok(Self::var(layout, r.start + i))
    }

    /// Builds a polynomial from (monomial, coefficient) pairs; duplicates are summed.
    pub fn from_terms(layout: &VariableLayout, terms: impl IntoIterator<Item = (Monomial, T)>) -> Result<Self, PolyError> {
        let mut p = Self::zero(layout);
        for (m, c) in terms {
            if m.nvars() != layout.total_dim() {
                return Err(PolyError::DimensionMismatch { expected: layout.total_dim(), got: m.nvars() });
            }
            p.add_term(m, c);
        }
        p.canonicalize();
        Ok(p)
    }

    /// Adds `c * m` without canonicalizing.
    pub(crate) fn add_term(&mut self, m: Monomial, c: T) {
        let e = self.terms.entry(m).or_insert_with(T::zero);
        *e += c;
    }

    pub fn canonicalize(&mut self) {
        self.terms.retain(|_, c| c.magnitude() >= CANONICAL_ZERO);
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    pub fn nvars(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).copied().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest degree in the variables of block `i`.
    pub fn block_degree(&self, i: usize) -> usize {
        let r = self.layout.range(i);
        self.terms.keys().map(|m| m.degree_in(r.clone())).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    fn check_layout(&self, other: &Self) -> Result<(), PolyError> {
        if self.layout != other.layout {
            return Err(PolyError::LayoutMismatch);
        }
        Ok(())
    }

    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self, PolyError> {
        self.check_layout(other)?;
        let mut out = match op {
            ArithOp::Add => {
                let mut out = self.clone();
                for (m, &c) in &other.terms {
                    out.add_term(m.clone(), c);
                }
                out
            }
            ArithOp::Sub => {
                let mut out = self.clone();
                for (m, &c) in &other.terms {
                    out.add_term(m.clone(), -c);
                }
                out
            }
            ArithOp::Mul => {
                let mut out = self.empty_like();
                for (ma, &ca) in &self.terms {
                    for (mb, &cb) in &other.terms {
                        out.add_term(ma.mul(mb), ca * cb);
                    }
                }
                out
            }
        };
        out.canonicalize();
        Ok(out)
    }

    pub fn scale(&self, c: T) -> Self {
        let mut out = self.empty_like();
        for (m, &a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out.canonicalize();
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.layout, T::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn evaluate(&self, point: &[T]) -> Result<T, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), got: point.len() });
        }
        let mut acc = T::zero();
        for (m, &c) in &self.terms {
            let mut v = c;
            for (&e, &x) in m.exponents().iter().zip(point) {
                if e > 0 {
                    v = v * x.powi(e as u32);
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = self.empty_like();
        for (m, &c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let dm = m.shifted(i, -1).expect("exponent positive");
            out.add_term(dm, c * T::from_real(e as f64));
        }
        out.canonicalize();
        out
    }

    /// Sum of pure second derivatives over the variables of `block`.
    pub fn laplacian(&self, block: &str) -> Result<Self, PolyError> {
        let r = self.layout.range_of(block)?;
        Ok(self.laplacian_range(r))
    }

    pub fn laplacian_range(&self, r: std::ops::Range<usize>) -> Self {
        let mut out = self.empty_like();
        for (m, &c) in &self.terms {
            for i in r.clone() {
                let e = m.exponent(i);
                if e < 2 {
                    continue;
                }
                let dm = m.shifted(i, -2).expect("exponent >= 2");
                out.add_term(dm, c * T::from_real((e as f64) * (e as f64 - 1.0)));
            }
        }
        out.canonicalize();
        out
    }

    /// Squared Euclidean norm of the variables in block `i`.
    pub fn block_norm_sq(layout: &VariableLayout, i: usize) -> Self {
        let mut p = Self::zero(layout);
        for v in layout.range(i) {
            let mut m = Monomial::one(layout.total_dim());
            m = m.shifted(v, 2).expect("nonnegative");
            p.add_term(m, T::one());
        }
        p
    }

    /// Terms whose degree in the variables `range` equals `degree`.
    pub fn slice_by_block_degree(&self, range: std::ops::Range<usize>, degree: usize) -> Self {
        let mut out = self.empty_like();
        for (m, &c) in &self.terms {
            if m.degree_in(range.clone()) == degree {
                out.terms.insert(m.clone(), c);
            }
        }
        out
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(T) -> U) -> Polynomial<U> {
        let mut out = Polynomial::<U> { layout: Arc::clone(&self.layout), terms: BTreeMap::new() };
        for (m, &c) in &self.terms {
            out.terms.insert(m.clone(), f(c));
        }
        out.canonicalize();
        out
    }
}

impl RealPoly {
    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars(), "point dimension mismatch");
        self.terms.iter().map(|(m, &c)| c * m.eval_real(point)).sum()
    }

    pub fn to_complex(&self) -> ComplexPoly {
        self.map_coeffs(|c| Complex64::new(c, 0.0))
    }
}

impl ComplexPoly {
    pub fn re(&self) -> RealPoly {
        self.map_coeffs(|c| c.re)
    }

    pub fn im(&self) -> RealPoly {
        self.map_coeffs(|c| c.im)
    }

    /// Conjugates coefficients; equals the pointwise conjugate on real points.
    pub fn conj_coeffs(&self) -> ComplexPoly {
        self.map_coeffs(|c| c.conj())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl<T: Scalar> $trait<&Polynomial<T>> for &Polynomial<T> {
            type Output = Polynomial<T>;
            /// Panics on layout mismatch; use [`Polynomial::arith`] for a checked version.
            fn $method(self, rhs: &Polynomial<T>) -> Polynomial<T> {
                self.arith(rhs, $op).expect("layout mismatch")
            }
        }
        impl<T: Scalar> $trait<Polynomial<T>> for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: Polynomial<T>) -> Polynomial<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c:?}*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
