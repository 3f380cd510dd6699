//! Normal forms in degree one and on tensor products of two factors.

use super::degree1::degree_one_relations;
use crate::error::{Error, Result};
use crate::expr::{degree_monomials, Monomial, Space, TautExpr, TensorExpr};
use crate::linalg::{Echelon, SparseVec};
use crate::Q;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

pub struct DivisorCatalog {
    pub space: Space,
    columns: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    echelon: Echelon,
}

impl DivisorCatalog {
    pub fn build(space: &Space) -> Result<Self> {
        let columns = degree_monomials(space, 1)?;
        let index = columns.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut cat = DivisorCatalog { space: space.clone(), columns, index, echelon: Echelon::new() };
        if space.dim() < 1 {
            for i in 0..cat.columns.len() {
                cat.echelon.insert(SparseVec::from([(i, Q::from_integer(1.into()))]));
            }
        }
        for r in degree_one_relations(space)? {
            let v = cat.vector(&r.terms)?;
            cat.echelon.insert(v);
        }
        Ok(cat)
    }

    fn vector(&self, terms: &BTreeMap<Monomial, Q>) -> Result<SparseVec> {
        let mut v = SparseVec::new();
        for (m, c) in terms.iter().filter(|(m, _)| !m.vanishes()) {
            let &i = self.index.get(m).ok_or_else(|| Error::DegreeMismatch(format!("{} is not a divisor class", m.name())))?;
            if !c.is_zero() {
                v.insert(i, c.clone());
            }
        }
        Ok(v)
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Divisor classes left after the relations.
    pub fn basis(&self) -> Vec<Monomial> {
        (0..self.columns.len()).filter(|&c| !self.echelon.is_pivot(c)).map(|c| self.columns[c].clone()).collect()
    }

    pub fn normal_form_terms(&self, terms: &BTreeMap<Monomial, Q>) -> Result<BTreeMap<Monomial, Q>> {
        let mut v = self.vector(terms)?;
        self.echelon.reduce(&mut v);
        Ok(v.into_iter().map(|(c, x)| (self.columns[c].clone(), x)).collect())
    }

    pub fn normal_form(&self, e: &TautExpr) -> Result<TautExpr> {
        let mut out = TautExpr::zero(&self.space);
        for (m, c) in self.normal_form_terms(&e.terms)? {
            out.add_term(m, c);
        }
        Ok(out)
    }
}

pub fn divisor_catalog(space: &Space) -> Result<Arc<DivisorCatalog>> {
    static CACHE: OnceLock<Mutex<HashMap<Space, Arc<DivisorCatalog>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(space) {
        return Ok(c.clone());
    }
    let c = Arc::new(DivisorCatalog::build(space)?);
    cache.lock().unwrap().insert(space.clone(), c.clone());
    Ok(c)
}

/// Normal form of a two-factor tensor of bidegree (1,1), factor by factor.
pub fn tensor_normal_form(t: &TensorExpr) -> Result<TensorExpr> {
    if t.factors.len() != 2 {
        return Err(Error::AmbientMismatch("expected two factors".into()));
    }
    let cats = [divisor_catalog(&t.factors[0])?, divisor_catalog(&t.factors[1])?];
    let mut by_right: BTreeMap<Monomial, BTreeMap<Monomial, Q>> = BTreeMap::new();
    for (ms, c) in &t.terms {
        by_right.entry(ms[1].clone()).or_default().insert(ms[0].clone(), c.clone());
    }
    let mut by_left: BTreeMap<Monomial, BTreeMap<Monomial, Q>> = BTreeMap::new();
    for (right, left) in by_right {
        for (l, c) in cats[0].normal_form_terms(&left)? {
            let slot = by_left.entry(l).or_default().entry(right.clone()).or_insert_with(Q::zero);
            *slot += c;
        }
    }
    let mut out = TensorExpr::zero(&t.factors);
    for (l, rights) in by_left {
        for (r, c) in cats[1].normal_form_terms(&rights)? {
            out.add_term(vec![l.clone(), r], c);
        }
    }
    Ok(out)
}
