use std::collections::HashMap;

use nalgebra::DMatrix;

use super::reduce::SphereReducer;
use super::MomentError;
use crate::conic::{ConicProblem, PsdBlock};
use crate::poly::{monomials_up_to, Monomial, RealPoly};
use crate::set::SetDescriptor;

/// Largest moment-matrix side accepted by default.
pub const MAX_MOMENT_SIDE: usize = 2000;
/// Largest hypercube dimension (the preordering has `2^n` products).
pub const MAX_CUBE_DIM: usize = 8;

/// How sphere equalities enter the relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereEncoding {
    /// Moments indexed by normal forms modulo the sphere ideal.
    #[default]
    Reduced,
    /// All monomials, with `L((1 - |x_i|^2) x^a) = 0` rows for `|a| <= 2t - 2`.
    Equalities,
}

/// Constraint structure of a moment relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSpec {
    pub nvars: usize,
    pub order: usize,
    /// Disjoint variable groups, each with sum of squares equal to one.
    pub spheres: Vec<Vec<usize>>,
    /// Coordinates with `1 - x_j^2 >= 0`, entering through all their products.
    pub boxes: Vec<usize>,
    pub encoding: SphereEncoding,
    pub max_side: usize,
}

impl MomentSpec {
    pub fn for_set(set: &SetDescriptor, order: usize) -> Self {
        let (spheres, boxes) = match *set {
            SetDescriptor::SphereProduct { .. } => (set.sphere_ranges().into_iter().map(|r| r.collect()).collect(), vec![]),
            SetDescriptor::Hypercube { n } => (vec![], (0..n).collect()),
        };
        Self { nvars: set.dim(), order, spheres, boxes, encoding: SphereEncoding::default(), max_side: MAX_MOMENT_SIDE }
    }

    pub fn with_encoding(mut self, encoding: SphereEncoding) -> Self {
        self.encoding = encoding;
        self
    }
}

/// A moment relaxation in conic standard form together with its monomial
/// bookkeeping. Variable `i` of [`Self::conic`] is the moment of
/// `moment_monomials()[i]`.
#[derive(Debug)]
pub struct MomentProblem {
    pub conic: ConicProblem,
    pub t: usize,
    pub certificate_degree: usize,
    pub encoding: SphereEncoding,
    nvars: usize,
    basis: Vec<Monomial>,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    reducer: Option<SphereReducer>,
}

impl MomentProblem {
    /// Monomials indexing the rows of the moment matrix (the first PSD block).
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn moment_monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Variable index of the moment of `1`.
    pub fn constant_index(&self) -> usize {
        self.index[&Monomial::one(self.nvars)]
    }

    /// `L(x^m)` as a combination of moment variables.
    pub fn monomial_form(&self, m: &Monomial) -> Result<Vec<(usize, f64)>, MomentError> {
        let lookup = |mm: &Monomial| {
            self.index.get(mm).copied().ok_or(MomentError::OrderTooSmall { degree: mm.degree(), t: self.t })
        };
        match &self.reducer {
            Some(r) => r.reduce(m).iter().map(|(mm, c)| Ok((lookup(mm)?, *c))).collect(),
            None => Ok(vec![(lookup(m)?, 1.0)]),
        }
    }

    /// `L(p)` as a combination of moment variables, merged and without zeros.
    pub fn linear_form(&self, p: &RealPoly) -> Result<Vec<(usize, f64)>, MomentError> {
        if p.nvars() != self.nvars {
            return Err(MomentError::Layout(format!("polynomial has {} variables, relaxation {}", p.nvars(), self.nvars)));
        }
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for (m, &c) in p.terms() {
            for (v, w) in self.monomial_form(m)? {
                *acc.entry(v).or_insert(0.0) += c * w;
            }
        }
        let mut out: Vec<(usize, f64)> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
        out.sort_by_key(|e| e.0);
        Ok(out)
    }

    /// Adds the linear moment constraint `L(p) = rhs`.
    pub fn add_moment_equality(&mut self, p: &RealPoly, rhs: f64) -> Result<(), MomentError> {
        let row = self.linear_form(p)?;
        self.conic.add_equality(row, rhs);
        Ok(())
    }

    /// `L(x^m)` at a moment vector.
    pub fn moment_value(&self, y: &[f64], m: &Monomial) -> Result<f64, MomentError> {
        Ok(self.monomial_form(m)?.iter().map(|&(v, c)| c * y[v]).sum())
    }

    /// The moment matrix at `y`.
    pub fn moment_matrix(&self, y: &[f64]) -> DMatrix<f64> {
        self.conic.blocks[0].evaluate(y)
    }
}

/// Relaxation of `min q` over `set` at order `t` (moments up to degree `2t`).
pub fn build_relaxation(q: &RealPoly, set: &SetDescriptor, t: usize) -> Result<MomentProblem, MomentError> {
    build_relaxation_with(q, set, t, SphereEncoding::default())
}

pub fn build_relaxation_with(q: &RealPoly, set: &SetDescriptor, t: usize, encoding: SphereEncoding) -> Result<MomentProblem, MomentError> {
    set.check_layout(q.layout()).map_err(|e| MomentError::Layout(e.to_string()))?;
    if let SetDescriptor::Hypercube { n } = *set {
        if n > MAX_CUBE_DIM {
            return Err(MomentError::CubeTooLarge(n));
        }
    }
    let spec = MomentSpec::for_set(set, t).with_encoding(encoding);
    build_from_spec(q, &spec)
}

/// Moment relaxation of `min q` for an explicit constraint structure.
pub fn build_from_spec(q: &RealPoly, spec: &MomentSpec) -> Result<MomentProblem, MomentError> {
    let t = spec.order;
    if t == 0 {
        return Err(MomentError::OrderTooSmall { degree: q.degree(), t });
    }
    if q.degree() > 2 * t {
        return Err(MomentError::OrderTooSmall { degree: q.degree(), t });
    }
    if q.nvars() != spec.nvars {
        return Err(MomentError::Layout(format!("polynomial has {} variables, spec {}", q.nvars(), spec.nvars)));
    }
    if spec.boxes.len() > MAX_CUBE_DIM {
        return Err(MomentError::CubeTooLarge(spec.boxes.len()));
    }
    let n = spec.nvars;
    let reducer = match spec.encoding {
        SphereEncoding::Reduced if !spec.spheres.is_empty() => Some(SphereReducer::new(&spec.spheres)),
        _ => None,
    };
    let standard = |m: &Monomial| reducer.as_ref().is_none_or(|r| r.is_standard(m));
    let basis: Vec<Monomial> = monomials_up_to(n, t).into_iter().filter(|m| standard(m)).collect();
    if basis.len() > spec.max_side {
        return Err(MomentError::TooLarge { side: basis.len(), limit: spec.max_side });
    }
    let monomials: Vec<Monomial> = monomials_up_to(n, 2 * t).into_iter().filter(|m| standard(m)).collect();
    let mut conic = ConicProblem::new();
    let mut index = HashMap::with_capacity(monomials.len());
    for m in &monomials {
        index.insert(m.clone(), conic.add_var(format!("y[{m}]"), 0.0));
    }
    let mut problem = MomentProblem {
        conic,
        t,
        certificate_degree: 2 * t,
        encoding: spec.encoding,
        nvars: n,
        basis,
        monomials,
        index,
        reducer,
    };

    let one = Monomial::one(n);
    let y0 = problem.constant_index();
    problem.conic.add_equality(vec![(y0, 1.0)], 1.0);
    for (v, c) in problem.linear_form(q)? {
        problem.conic.objective[v] += c;
    }

    let moment_block = localizing_block(&problem, &[(one.clone(), 1.0)], &problem.basis)?;
    problem.conic.add_block(moment_block);

    if problem.reducer.is_none() && !spec.spheres.is_empty() {
        let rows = monomials_up_to(n, 2 * t - 2);
        for group in &spec.spheres {
            for a in &rows {
                let mut row = vec![(problem.index[a], 1.0)];
                for &j in group {
                    let m = a.shifted(j, 2).expect("raising an exponent");
                    row.push((problem.index[&m], -1.0));
                }
                problem.conic.add_equality(row, 0.0);
            }
        }
    }

    let k = spec.boxes.len();
    for mask in 1u32..(1u32 << k) {
        let size = mask.count_ones() as usize;
        if size > t {
            continue;
        }
        let chosen: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| spec.boxes[i]).collect();
        let g = box_product(n, &chosen);
        let local_basis: Vec<Monomial> = monomials_up_to(n, t - size);
        let block = localizing_block(&problem, &g, &local_basis)?;
        problem.conic.add_block(block);
    }
    Ok(problem)
}

/// `prod_{j in chosen} (1 - x_j^2)` expanded into monomials.
fn box_product(n: usize, chosen: &[usize]) -> Vec<(Monomial, f64)> {
    let mut terms = vec![(Monomial::one(n), 1.0)];
    for &j in chosen {
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (m, c) in &terms {
            next.push((m.clone(), *c));
            next.push((m.shifted(j, 2).expect("raising an exponent"), -c));
        }
        terms = next;
    }
    terms
}

/// PSD block `[L(g x^a x^b)]_{a, b in basis}`.
fn localizing_block(problem: &MomentProblem, g: &[(Monomial, f64)], basis: &[Monomial]) -> Result<PsdBlock, MomentError> {
    let mut block = PsdBlock::new(basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (i, a) in basis.iter().enumerate().take(j + 1) {
            let ab = a.mul(b);
            let mut acc: HashMap<usize, f64> = HashMap::new();
            for (gm, gc) in g {
                for (v, c) in problem.monomial_form(&ab.mul(gm))? {
                    *acc.entry(v).or_insert(0.0) += gc * c;
                }
            }
            let mut entries: Vec<(usize, f64)> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
            entries.sort_by_key(|e| e.0);
            for (v, c) in entries {
                block.add(v, i, j, c);
            }
        }
    }
    Ok(block)
}
