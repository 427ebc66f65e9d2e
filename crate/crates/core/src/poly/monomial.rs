use std::cmp::Ordering;
use std::fmt;

/// Exponent vector over all variables of a layout.
///
/// Ordered graded-lexicographically: by total degree, then lexicographically
/// with earlier variables leading, so that a sorted listing reads
/// `1, x1, x2, ..., x1^2, x1 x2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self { exps: vec![0; nvars] }
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Self { exps }
    }

    /// The single variable `z_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    pub fn degree_in(&self, range: std::ops::Range<usize>) -> usize {
        self.exps[range].iter().map(|&e| e as usize).sum()
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    /// Exponent vector with `delta` added at position `i`; `None` if it would go negative.
    pub fn shifted(&self, i: usize, delta: i32) -> Option<Monomial> {
        let e = self.exps[i] as i32 + delta;
        if e < 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] = e as u16;
        Some(Monomial { exps })
    }

    pub fn eval_real(&self, point: &[f64]) -> f64 {
        self.exps
            .iter()
            .zip(point)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "z{i}")?;
            } else {
                write!(f, "z{i}^{e}")?;
            }
        }
        Ok(())
    }
}

/// All exponent vectors in `nvars` variables with total degree `<= max_degree`,
/// in graded-lexicographic order.
pub fn monomials_up_to(nvars: usize, max_degree: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut cur = vec![0u16; nvars];
        homogeneous(nvars, d, 0, &mut cur, &mut out);
    }
    out
}

/// All exponent vectors of exact total degree `degree`, lexicographically descending.
pub fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    homogeneous(nvars, degree, 0, &mut cur, &mut out);
    out
}

fn homogeneous(nvars: usize, remaining: usize, pos: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
    if nvars == 0 {
        if remaining == 0 {
            out.push(Monomial::from_exponents(Vec::new()));
        }
        return;
    }
    if pos == nvars - 1 {
        cur[pos] = remaining as u16;
        out.push(Monomial::from_exponents(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e as u16;
        homogeneous(nvars, remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Binomial coefficient as `u128`; exact for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
