use std::collections::HashMap;
use std::sync::Mutex;

use crate::poly::Monomial;

/// Normal forms modulo `sum_{j in S} x_j^2 = 1` for disjoint variable groups
/// `S`, rewriting the square of each group's last variable (its pivot).
/// A monomial is standard when every pivot exponent is at most one.
#[derive(Debug)]
pub(crate) struct SphereReducer {
    groups: Vec<(Vec<usize>, usize)>,
    cache: Mutex<HashMap<Monomial, Vec<(Monomial, f64)>>>,
}

impl SphereReducer {
    pub fn new(groups: &[Vec<usize>]) -> Self {
        let groups = groups.iter().map(|g| (g.clone(), *g.last().expect("non-empty group"))).collect();
        Self { groups, cache: Mutex::new(HashMap::new()) }
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        self.groups.iter().all(|(_, p)| m.exponent(*p) <= 1)
    }

    /// Standard-monomial expansion of `m` on the sphere product.
    pub fn reduce(&self, m: &Monomial) -> Vec<(Monomial, f64)> {
        if self.is_standard(m) {
            return vec![(m.clone(), 1.0)];
        }
        if let Some(hit) = self.cache.lock().expect("cache lock").get(m) {
            return hit.clone();
        }
        let (group, pivot) = self.groups.iter().find(|(_, p)| m.exponent(*p) >= 2).expect("non-standard");
        let base = m.shifted(*pivot, -2).expect("pivot exponent >= 2");
        let mut acc: HashMap<Monomial, f64> = HashMap::new();
        for (mm, c) in self.reduce(&base) {
            *acc.entry(mm).or_insert(0.0) += c;
        }
        for &j in group.iter().filter(|&&j| j != *pivot) {
            let next = base.shifted(j, 2).expect("raising an exponent");
            for (mm, c) in self.reduce(&next) {
                *acc.entry(mm).or_insert(0.0) -= c;
            }
        }
        let mut out: Vec<(Monomial, f64)> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        self.cache.lock().expect("cache lock").insert(m.clone(), out.clone());
        out
    }
}
