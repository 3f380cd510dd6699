//! Decorated strata classes and their formal linear combinations over Q.

mod basis;
mod kinds;

pub use basis::{degree_monomials, essential_basis, is_essential, Block};
pub use kinds::{classify, display_scale, Kind, SepSide};

use crate::error::{Error, Result};
use crate::graph::{aut_count, canonicalize, CanonKey, HalfEdge, StableGraph};
use crate::marking::Marking;
use crate::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// The space M_{g,P}. Markings are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Space {
    pub genus: u32,
    pub markings: Vec<Marking>,
}

impl Space {
    pub fn new(genus: u32, markings: &[Marking]) -> Result<Self> {
        let mut ms = markings.to_vec();
        ms.sort();
        ms.dedup();
        if ms.len() != markings.len() {
            return Err(Error::Parse("repeated marking".into()));
        }
        if !crate::graph::space_is_stable(genus, ms.len()) {
            return Err(Error::Unstable(format!("M_{{{genus},{}}} is not stable", ms.len())));
        }
        Ok(Space { genus, markings: ms })
    }

    pub fn n(&self) -> usize {
        self.markings.len()
    }

    pub fn dim(&self) -> i64 {
        crate::graph::space_dim(self.genus, self.n())
    }

    pub fn with(&self, extra: &[Marking]) -> Result<Space> {
        let mut ms = self.markings.clone();
        ms.extend(extra.iter().cloned());
        Space::new(self.genus, &ms)
    }

    pub fn without(&self, drop: &[Marking]) -> Result<Space> {
        let ms: Vec<Marking> = self.markings.iter().filter(|m| !drop.contains(m)).cloned().collect();
        Space::new(self.genus, &ms)
    }

    pub fn trivial_graph(&self) -> StableGraph {
        StableGraph::trivial(self.genus, &self.markings)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = self.markings.iter().map(|m| m.to_string()).collect();
        write!(f, "M({},{{{}}})", self.genus, ms.join(","))
    }
}

/// A decorated stratum class in canonical form. Its value is
/// xi_{Gamma*}(decoration) / |Aut Gamma|.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub CanonKey);

impl Monomial {
    pub fn key(&self) -> &CanonKey {
        &self.0
    }

    pub fn graph(&self) -> StableGraph {
        self.0.graph()
    }

    pub fn stratum(graph: &StableGraph) -> Monomial {
        Decorated::bare(graph.clone()).canon()
    }

    pub fn mumford(space: &Space, kappa: Vec<u8>, psi: BTreeMap<Marking, u8>) -> Monomial {
        let mut d = Decorated::bare(space.trivial_graph());
        let mut kappa = kappa;
        kappa.sort();
        d.kappa[0] = kappa;
        d.leg_psi = psi.into_iter().filter(|(_, e)| *e > 0).collect();
        d.canon()
    }

    pub fn codim(&self) -> usize {
        self.0.edges.len()
    }

    pub fn deco_degree(&self) -> usize {
        let k: usize = self.0.verts.iter().flat_map(|v| v.1.iter()).map(|&a| a as usize).sum();
        let l: usize = self.0.legs.iter().map(|l| l.2 as usize).sum();
        let e: usize = self.0.edges.iter().map(|e| (e.1 + e.3) as usize).sum();
        k + l + e
    }

    pub fn degree(&self) -> usize {
        self.codim() + self.deco_degree()
    }

    /// True when some vertex carries more decoration than the dimension of
    /// its moduli space, so the class is zero.
    pub fn vanishes(&self) -> bool {
        let k = &self.0;
        let n = k.verts.len();
        let mut valence = vec![0i64; n];
        let mut local: Vec<i64> = k.verts.iter().map(|v| v.1.iter().map(|&a| a as i64).sum()).collect();
        for (_, v, p) in &k.legs {
            valence[*v] += 1;
            local[*v] += *p as i64;
        }
        for &(u, pu, v, pv) in &k.edges {
            valence[u] += 1;
            valence[v] += 1;
            local[u] += pu as i64;
            local[v] += pv as i64;
        }
        (0..n).any(|v| local[v] > 3 * k.verts[v].0 as i64 - 3 + valence[v])
    }

    pub fn genus(&self) -> u32 {
        self.graph().genus()
    }

    pub fn markings(&self) -> Vec<Marking> {
        self.0.legs.iter().map(|l| l.0.clone()).collect()
    }

    pub fn aut(&self) -> u64 {
        aut_count(&self.graph())
    }

    /// Automorphisms of the graph that also preserve the decoration.
    pub fn decorated_aut(&self) -> u64 {
        let d = self.decorated();
        crate::graph::isomorphisms(&d.graph, &d.graph)
            .iter()
            .filter(|iso| {
                (0..d.graph.n_vertices()).all(|v| d.kappa[v] == d.kappa[iso.vmap[v]])
                    && d.graph.half_edges().iter().all(|h| d.psi(h) == d.psi(&iso.map_half(h)))
            })
            .count() as u64
    }

    pub fn decorated(&self) -> Decorated {
        Decorated {
            graph: self.graph(),
            kappa: self.0.kappa(),
            leg_psi: self.0.leg_psi(),
            edge_psi: self.0.edge_psi(),
        }
    }

    pub fn is_undecorated(&self) -> bool {
        self.deco_degree() == 0
    }

    pub fn name(&self) -> String {
        kinds::name(self)
    }

    /// Renames legs; markings missing from `map` keep their label.
    pub fn relabel(&self, map: &BTreeMap<Marking, Marking>) -> Monomial {
        let d = self.decorated();
        let rename = |m: &Marking| map.get(m).cloned().unwrap_or_else(|| m.clone());
        Decorated {
            graph: d.graph.relabel(map),
            kappa: d.kappa,
            leg_psi: d.leg_psi.iter().map(|(m, &e)| (rename(m), e)).collect(),
            edge_psi: d.edge_psi,
        }
        .canon()
    }
}

/// A graph with a monomial decoration in any vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decorated {
    pub graph: StableGraph,
    pub kappa: Vec<Vec<u8>>,
    pub leg_psi: BTreeMap<Marking, u8>,
    pub edge_psi: Vec<[u8; 2]>,
}

impl Decorated {
    pub fn bare(graph: StableGraph) -> Self {
        let n = graph.n_vertices();
        let e = graph.n_edges();
        Decorated { graph, kappa: vec![Vec::new(); n], leg_psi: BTreeMap::new(), edge_psi: vec![[0, 0]; e] }
    }

    pub fn canon(&self) -> Monomial {
        Monomial(canonicalize(&self.graph, &self.kappa, &self.leg_psi, &self.edge_psi))
    }

    pub fn psi(&self, h: &HalfEdge) -> u8 {
        match h {
            HalfEdge::Leg(m) => self.leg_psi.get(m).copied().unwrap_or(0),
            HalfEdge::Edge(e, s) => self.edge_psi[*e][*s as usize],
        }
    }

    pub fn add_psi(&mut self, h: &HalfEdge, k: u8) {
        if k == 0 {
            return;
        }
        match h {
            HalfEdge::Leg(m) => *self.leg_psi.entry(m.clone()).or_default() += k,
            HalfEdge::Edge(e, s) => self.edge_psi[*e][*s as usize] += k,
        }
    }

    pub fn add_kappa(&mut self, v: usize, a: u8) {
        self.kappa[v].push(a);
        self.kappa[v].sort();
    }

    /// Whether any decoration sits at vertex `v` or on its half-edges.
    pub fn local_degree(&self, v: usize) -> usize {
        let k: usize = self.kappa[v].iter().map(|&a| a as usize).sum();
        let h: usize = self.graph.half_edges_at(v).iter().map(|h| self.psi(h) as usize).sum();
        k + h
    }
}

fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn format_q(q: &Q) -> String {
    fmt_q(q)
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A homogeneous-or-not formal combination of monomials on one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautExpr {
    pub space: Space,
    pub terms: BTreeMap<Monomial, Q>,
}

impl TautExpr {
    pub fn zero(space: &Space) -> Self {
        TautExpr { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn from_monomial(space: &Space, m: Monomial) -> Self {
        let mut e = Self::zero(space);
        e.add_term(m, Q::one());
        e
    }

    pub fn one(space: &Space) -> Self {
        Self::from_monomial(space, Monomial::stratum(&space.trivial_graph()))
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TautExpr, c: &Q) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> TautExpr {
        let mut out = TautExpr::zero(&self.space);
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops the terms that vanish for dimension reasons.
    pub fn pruned(&self) -> TautExpr {
        let mut out = self.clone();
        out.terms.retain(|m, _| !m.vanishes());
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms; errors on mixed degrees. Zero has degree None.
    pub fn degree(&self) -> Result<Option<usize>> {
        let mut d = None;
        for m in self.terms.keys() {
            match d {
                None => d = Some(m.degree()),
                Some(x) if x != m.degree() => {
                    return Err(Error::DegreeMismatch(format!("terms of degree {x} and {}", m.degree())))
                }
                _ => {}
            }
        }
        Ok(d)
    }

    pub fn check_space(&self) -> Result<()> {
        for m in self.terms.keys() {
            if m.genus() != self.space.genus || m.markings() != self.space.markings {
                return Err(Error::AmbientMismatch(format!("term {} does not live on {}", m.name(), self.space)));
            }
        }
        Ok(())
    }

    pub fn sub(&self, other: &TautExpr) -> TautExpr {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    /// Transports the class along a bijection of markings onto `target`.
    pub fn relabel(&self, map: &BTreeMap<Marking, Marking>, target: &Space) -> Result<TautExpr> {
        if target.genus != self.space.genus || target.n() != self.space.n() {
            return Err(Error::AmbientMismatch(format!("cannot relabel {} onto {}", self.space, target)));
        }
        let mut out = TautExpr::zero(target);
        for (m, c) in &self.terms {
            out.add_term(m.relabel(map), c.clone());
        }
        out.check_space()?;
        Ok(out)
    }
}

impl fmt::Display for TautExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({}) {}", fmt_q(&(c * display_scale(m))), m.name()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A combination of tensor products of monomials on a product of spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorExpr {
    pub factors: Vec<Space>,
    pub terms: BTreeMap<Vec<Monomial>, Q>,
}

impl TensorExpr {
    pub fn zero(factors: &[Space]) -> Self {
        TensorExpr { factors: factors.to_vec(), terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, m: Vec<Monomial>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorExpr, c: &Q) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    /// Drops the terms with a factor that vanishes for dimension reasons.
    pub fn pruned(&self) -> TensorExpr {
        let mut out = self.clone();
        out.terms.retain(|ms, _| !ms.iter().any(Monomial::vanishes));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Keeps only terms whose factor degrees equal `degrees`.
    pub fn component(&self, degrees: &[usize]) -> TensorExpr {
        let mut out = TensorExpr::zero(&self.factors);
        for (ms, c) in &self.terms {
            if ms.iter().map(|m| m.degree()).eq(degrees.iter().copied()) {
                out.add_term(ms.clone(), c.clone());
            }
        }
        out
    }

    /// Terms grouped by their factor degrees.
    pub fn degree_patterns(&self) -> Vec<Vec<usize>> {
        let mut pats: Vec<Vec<usize>> = self.terms.keys().map(|ms| ms.iter().map(|m| m.degree()).collect()).collect();
        pats.sort();
        pats.dedup();
        pats
    }

    /// Converts a single-factor tensor expression into an ordinary expression.
    pub fn into_single(self) -> TautExpr {
        assert_eq!(self.factors.len(), 1);
        let mut out = TautExpr::zero(&self.factors[0]);
        for (mut ms, c) in self.terms {
            out.add_term(ms.pop().unwrap(), c);
        }
        out
    }
}

impl fmt::Display for TensorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(ms, c)| {
                let names: Vec<String> = ms.iter().map(|m| m.name()).collect();
                let scale: Q = ms.iter().map(display_scale).product();
                format!("({}) {}", fmt_q(&(c * scale)), names.join(" (x) "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
