//! Known relations in degree two on a fixed space and the normal form they
//! induce on the essential basis.

use super::data::{load_natives, NativeRelation};
use super::degree1::degree_one_relations;
use crate::calculus::{boundary_map, forget_pullback_many, multiply};
use crate::error::{Error, Result};
use crate::expr::{classify, degree_monomials, essential_basis, is_essential, Kind, Monomial, Space, TautExpr, TensorExpr};
use crate::graph::enumerate;
use crate::linalg::{Echelon, SparseVec};
use crate::marking::Marking;
use crate::Q;
use itertools::Itertools;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Where a relation comes from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    /// The space has dimension below two.
    Dimension,
    /// A degree-one relation on a vertex of a divisor, pushed forward.
    Divisor,
    /// A degree-one relation on the space times a divisor class.
    Product,
    /// A relation from the data file, relabelled and pulled back.
    Native(String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Dimension => write!(f, "dimension"),
            Source::Divisor => write!(f, "divisor-pushforward"),
            Source::Product => write!(f, "degree-one-product"),
            Source::Native(id) => write!(f, "native:{id}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub source: Source,
    pub expr: TautExpr,
}

/// Relations on a space with a chosen marking order, in echelon form.
pub struct Catalog {
    pub space: Space,
    pub order: Vec<Marking>,
    columns: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Columns before this one are not essential.
    first_essential: usize,
    echelon: Echelon,
    pub relations: Vec<Relation>,
}

/// Coordinates of a class on the part of the essential basis that survives
/// the relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub coords: Vec<(Monomial, Q)>,
}

impl Reduced {
    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn to_expr(&self, space: &Space) -> TautExpr {
        let mut e = TautExpr::zero(space);
        for (m, c) in &self.coords {
            e.add_term(m.clone(), c.clone());
        }
        e
    }
}

/// The native relations in use, loaded once.
pub fn natives() -> Result<&'static [NativeRelation]> {
    static NATIVES: OnceLock<std::result::Result<Vec<NativeRelation>, String>> = OnceLock::new();
    NATIVES
        .get_or_init(|| load_natives().map_err(|e| e.to_string()))
        .as_deref()
        .map_err(|e| Error::Catalog(e.clone()))
}

/// Among essential classes, the ones that relations in genus two are used to
/// eliminate first: psi_i delta(2, P - {j,k}) with i before j and k.
pub fn eliminated_first(m: &Monomial, space: &Space, order: &[Marking]) -> bool {
    if space.genus != 2 {
        return false;
    }
    let Kind::PsiLegSep(x, s) = classify(m) else { return false };
    if s.a != 2 {
        return false;
    }
    let pos = |y: &Marking| order.iter().position(|z| z == y);
    let rest: Vec<&Marking> = space.markings.iter().filter(|y| !s.side.contains(y)).collect();
    rest.len() == 2 && rest.iter().all(|y| pos(y) > pos(&x))
}

/// Images of a native relation on `space`: every injective relabelling of
/// its markings into the space, then pulled back along the forgetful map.
pub fn native_images(native: &NativeRelation, space: &Space) -> Result<Vec<TautExpr>> {
    let src = &native.expr.space;
    if src.genus != space.genus || src.n() > space.n() {
        return Ok(Vec::new());
    }
    let mut images = BTreeSet::new();
    let mut out = Vec::new();
    for targets in space.markings.iter().permutations(src.n()) {
        let map: BTreeMap<Marking, Marking> = src.markings.iter().cloned().zip(targets.iter().map(|m| (*m).clone())).collect();
        let image_space = Space::new(space.genus, &targets.iter().map(|m| (*m).clone()).collect::<Vec<_>>())?;
        let rel = native.expr.relabel(&map, &image_space)?;
        let key: Vec<(Monomial, Q)> = rel.terms.clone().into_iter().collect();
        if !images.insert(key) {
            continue;
        }
        let rest: Vec<Marking> = space.markings.iter().filter(|m| !targets.contains(m)).cloned().collect();
        out.push(forget_pullback_many(&rel, &rest)?);
    }
    Ok(out)
}

/// Degree-one relations on each vertex of genus at most two of each
/// divisor, pushed forward.
fn divisor_relations(space: &Space) -> Result<Vec<TautExpr>> {
    let mut out = Vec::new();
    for ng in enumerate(space.genus, &space.markings, 1)? {
        let map = boundary_map(space, &ng.graph)?;
        let ones: Vec<Monomial> = map.factors.iter().map(|f| Monomial::mumford(f, vec![], BTreeMap::new())).collect();
        for (i, f) in map.factors.iter().enumerate() {
            if f.genus > 2 {
                continue;
            }
            for r in degree_one_relations(f)? {
                let mut t = TensorExpr::zero(&map.factors);
                for (m, c) in &r.terms {
                    let mut ms = ones.clone();
                    ms[i] = m.clone();
                    t.add_term(ms, c.clone());
                }
                out.push(map.pushforward(&t)?);
            }
        }
    }
    Ok(out)
}

impl Catalog {
    pub fn build(space: &Space, order: Option<&[Marking]>) -> Result<Catalog> {
        Self::build_filtered(space, order, &|_| true)
    }

    /// Like `build`, using only the native relations whose id passes `keep`.
    pub fn build_filtered(space: &Space, order: Option<&[Marking]>, keep: &dyn Fn(&str) -> bool) -> Result<Catalog> {
        let order: Vec<Marking> = order.map(|o| o.to_vec()).unwrap_or_else(|| space.markings.clone());
        let mut sorted = order.clone();
        sorted.sort();
        if sorted != space.markings {
            return Err(Error::AmbientMismatch("the order must list each marking once".into()));
        }
        let all = degree_monomials(space, 2)?;
        let mut columns: Vec<Monomial> = all.iter().filter(|m| !is_essential(m, space, &order)).cloned().collect();
        columns.sort();
        let first_essential = columns.len();
        let basis = essential_basis(space, Some(&order))?;
        let (early, late): (Vec<Monomial>, Vec<Monomial>) =
            basis.into_iter().partition(|m| eliminated_first(m, space, &order));
        columns.extend(early);
        columns.extend(late);
        let index = columns.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut cat = Catalog { space: space.clone(), order, columns, index, first_essential, echelon: Echelon::new(), relations: Vec::new() };

        if space.dim() < 2 {
            for m in all {
                cat.add(Source::Dimension, TautExpr::from_monomial(space, m))?;
            }
            return Ok(cat);
        }
        for r in divisor_relations(space)? {
            cat.add(Source::Divisor, r)?;
        }
        if space.genus <= 2 {
            let gens = degree_monomials(space, 1)?;
            for r in degree_one_relations(space)? {
                for m in &gens {
                    let p = multiply(&r, &TautExpr::from_monomial(space, m.clone()))?;
                    cat.add(Source::Product, p)?;
                }
            }
        }
        for native in natives()?.iter().filter(|n| keep(&n.id)) {
            for r in native_images(native, space)? {
                cat.add(Source::Native(native.id.clone()), r)?;
            }
        }
        Ok(cat)
    }

    fn add(&mut self, source: Source, expr: TautExpr) -> Result<()> {
        let v = self.vector(&expr)?;
        if !v.is_empty() && self.echelon.insert(v) {
            self.relations.push(Relation { source, expr });
        }
        Ok(())
    }

    pub fn vector(&self, e: &TautExpr) -> Result<SparseVec> {
        if e.space != self.space {
            return Err(Error::AmbientMismatch(format!("{} is not {}", e.space, self.space)));
        }
        let mut v = SparseVec::new();
        for (m, c) in e.terms.iter().filter(|(m, _)| !m.vanishes()) {
            let &i = self.index.get(m).ok_or_else(|| Error::DegreeMismatch(format!("{} is not a degree-two class", m.name())))?;
            v.insert(i, c.clone());
        }
        Ok(v)
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn columns(&self) -> &[Monomial] {
        &self.columns
    }

    pub fn essential(&self) -> &[Monomial] {
        &self.columns[self.first_essential..]
    }

    /// Essential classes not eliminated by the relations, in column order.
    pub fn reduced_basis(&self) -> Vec<Monomial> {
        (self.first_essential..self.columns.len()).filter(|&c| !self.echelon.is_pivot(c)).map(|c| self.columns[c].clone()).collect()
    }

    /// Classes that are neither essential nor eliminated by the relations.
    pub fn unexplained(&self) -> Vec<Monomial> {
        (0..self.first_essential).filter(|&c| !self.echelon.is_pivot(c)).map(|c| self.columns[c].clone()).collect()
    }

    pub fn is_relation(&self, e: &TautExpr) -> Result<bool> {
        Ok(self.echelon.contains(&self.vector(e)?))
    }

    /// The unique representative of `e` modulo relations supported on
    /// non-pivot columns.
    pub fn normal_form(&self, e: &TautExpr) -> Result<TautExpr> {
        let mut v = self.vector(e)?;
        self.echelon.reduce(&mut v);
        let mut out = TautExpr::zero(&self.space);
        for (c, x) in v {
            out.add_term(self.columns[c].clone(), x);
        }
        Ok(out)
    }

    /// Coordinates on the reduced basis. Terms that survive outside it are
    /// reported as a relation candidate.
    pub fn reduce(&self, e: &TautExpr) -> Result<Reduced> {
        let nf = self.normal_form(e)?;
        let stray: Vec<String> = nf
            .terms
            .iter()
            .filter(|(m, _)| self.index[*m] < self.first_essential)
            .map(|(m, c)| format!("{} {}", crate::expr::format_q(c), m.name()))
            .collect();
        if !stray.is_empty() {
            return Err(Error::RelationCandidate { terms: stray.len(), residual: stray.join(" + ") });
        }
        let mut coords: Vec<(Monomial, Q)> = nf.terms.into_iter().collect();
        coords.sort_by_key(|(m, _)| self.index[m]);
        Ok(Reduced { coords })
    }
}

type CatalogKey = (Space, Vec<Marking>);

/// Shared catalog for the space with its default marking order.
pub fn catalog(space: &Space) -> Result<Arc<Catalog>> {
    catalog_with_order(space, &space.markings)
}

pub fn catalog_with_order(space: &Space, order: &[Marking]) -> Result<Arc<Catalog>> {
    static CACHE: OnceLock<Mutex<HashMap<CatalogKey, Arc<Catalog>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (space.clone(), order.to_vec());
    if let Some(c) = cache.lock().unwrap().get(&key) {
        return Ok(c.clone());
    }
    let c = Arc::new(Catalog::build(space, Some(order))?);
    cache.lock().unwrap().insert(key, c.clone());
    Ok(c)
}

/// The rank of a family of expressions on one space.
pub fn span_rank(rows: &[TautExpr]) -> usize {
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut ech = Echelon::new();
    for r in rows {
        let mut v = SparseVec::new();
        for (m, c) in &r.terms {
            let n = index.len();
            let i = *index.entry(m.clone()).or_insert(n);
            if !c.is_zero() {
                v.insert(i, c.clone());
            }
        }
        ech.insert(v);
    }
    ech.rank()
}
