use crate::error::{Error, Result};
use crate::expr::{Decorated, Monomial, Space, TautExpr, TensorExpr};
use crate::graph::{
    canonical_key, contract_edge, disjoint_union, enumerate, glue_legs, isomorphisms, CanonKey, HalfEdge, StableGraph,
};
use crate::marking::{fresh_aux, Marking, AUX_Q, AUX_S};
use crate::Q;
use itertools::Itertools;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// A boundary gluing map xi_A : prod_v M_{g(v), n(v)} -> M_{g,P} for a
/// graph A with one edge. Side 0 of the edge becomes leg `cut[0]` on its
/// factor and side 1 becomes `cut[1]`.
pub struct BoundaryMap {
    pub space: Space,
    pub divisor: StableGraph,
    pub cut: [Marking; 2],
    pub factors: Vec<Space>,
    pub aut: u64,
    index: [OnceLock<AGraphIndex>; 3],
}

struct AGraph {
    parts: Vec<StableGraph>,
    union: StableGraph,
    voff: Vec<usize>,
    eoff: Vec<usize>,
}

#[derive(Default)]
struct AGraphIndex {
    graphs: Vec<AGraph>,
    by_f: HashMap<CanonKey, Vec<usize>>,
    by_j: HashMap<CanonKey, Vec<usize>>,
}

impl BoundaryMap {
    pub fn new(space: &Space, divisor: &StableGraph) -> Result<Self> {
        if divisor.n_edges() != 1 || !divisor.is_connected() || !divisor.is_stable() {
            return Err(Error::Gluing("a boundary map needs a stable connected graph with one edge".into()));
        }
        if divisor.genus() != space.genus || divisor.markings() != space.markings {
            return Err(Error::AmbientMismatch(format!("divisor does not live on {space}")));
        }
        let (a, b) = divisor.edges[0];
        let prefer = if a == b { AUX_Q } else { AUX_S };
        let names = fresh_aux(&space.markings, 2, prefer);
        let cut = [names[0].clone(), names[1].clone()];
        let mut factors = Vec::new();
        for v in 0..divisor.n_vertices() {
            let mut ms = divisor.legs_at(v);
            if a == v {
                ms.push(cut[0].clone());
            }
            if b == v {
                ms.push(cut[1].clone());
            }
            factors.push(Space::new(divisor.genera[v], &ms)?);
        }
        Ok(BoundaryMap {
            space: space.clone(),
            divisor: divisor.clone(),
            cut,
            factors,
            aut: crate::graph::aut_count(divisor),
            index: Default::default(),
        })
    }

    fn index(&self, codim: usize) -> &AGraphIndex {
        self.index[codim].get_or_init(|| self.build_index(codim))
    }

    fn build_index(&self, codim: usize) -> AGraphIndex {
        let mut idx = AGraphIndex::default();
        let per_factor: Vec<Vec<Vec<StableGraph>>> = self
            .factors
            .iter()
            .map(|f| {
                (0..=codim)
                    .map(|c| {
                        enumerate(f.genus, &f.markings, c)
                            .map(|v| v.into_iter().map(|n| n.graph).collect())
                            .unwrap_or_default()
                    })
                    .collect()
            })
            .collect();
        let splits: Vec<Vec<usize>> = (0..self.factors.len())
            .map(|_| 0..=codim)
            .multi_cartesian_product()
            .filter(|c: &Vec<usize>| c.iter().sum::<usize>() == codim)
            .collect();
        for split in splits {
            let choices: Vec<&Vec<StableGraph>> = split.iter().enumerate().map(|(i, &c)| &per_factor[i][c]).collect();
            for parts in choices.into_iter().map(|v| v.iter()).multi_cartesian_product() {
                let parts: Vec<StableGraph> = parts.into_iter().cloned().collect();
                let (union, voff, eoff) = disjoint_union(&parts).expect("factor legs are disjoint");
                let glued = glue_legs(&union, &self.cut[0], &self.cut[1]).expect("cut legs exist");
                let contracted = contract_edge(&glued, glued.n_edges() - 1).expect("edge exists");
                let n = idx.graphs.len();
                idx.by_f.entry(canonical_key(&contracted.graph)).or_default().push(n);
                if codim <= 1 {
                    idx.by_j.entry(canonical_key(&glued)).or_default().push(n);
                }
                idx.graphs.push(AGraph { parts, union, voff, eoff });
            }
        }
        idx
    }

    fn split(&self, ag: &AGraph, dec: &Decorated) -> Vec<Monomial> {
        ag.parts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let vo = ag.voff[i];
                let eo = ag.eoff[i];
                let d = Decorated {
                    graph: p.clone(),
                    kappa: dec.kappa[vo..vo + p.n_vertices()].to_vec(),
                    leg_psi: dec.leg_psi.iter().filter(|(m, _)| p.legs.contains_key(*m)).map(|(m, &e)| (m.clone(), e)).collect(),
                    edge_psi: dec.edge_psi[eo..eo + p.n_edges()].to_vec(),
                };
                d.canon()
            })
            .collect()
    }

    /// xi_A^* of a single monomial.
    pub fn pullback_monomial(&self, m: &Monomial) -> Result<TensorExpr> {
        let c = m.codim();
        if c > 2 {
            return Err(Error::DegreeMismatch("pullback supports strata of codimension at most two".into()));
        }
        let gamma = m.graph();
        let deco = m.decorated();
        let key = canonical_key(&gamma);
        let mut out = TensorExpr::zero(&self.factors);
        let idx = self.index(c);
        for &gi in idx.by_f.get(&key).into_iter().flatten() {
            let ag = &idx.graphs[gi];
            let glued = glue_legs(&ag.union, &self.cut[0], &self.cut[1])?;
            let con = contract_edge(&glued, glued.n_edges() - 1)?;
            let isos = isomorphisms(&con.graph, &gamma);
            let w = Q::new(1.into(), (isos.len() as i64).into());
            for phi in &isos {
                let mut base = Decorated::bare(ag.union.clone());
                for e in 0..con.graph.n_edges() {
                    for s in 0..2u8 {
                        let p = deco.psi(&phi.map_half(&HalfEdge::Edge(e, s)));
                        base.add_psi(&HalfEdge::Edge(e, s), p);
                    }
                }
                for leg in con.graph.legs.keys() {
                    base.add_psi(&HalfEdge::Leg(leg.clone()), deco.psi(&HalfEdge::Leg(leg.clone())));
                }
                let mut decs = vec![base];
                for xw in 0..con.graph.n_vertices() {
                    let pre: Vec<usize> = (0..ag.union.n_vertices()).filter(|&u| con.vmap[u] == xw).collect();
                    for &a in &deco.kappa[phi.vmap[xw]] {
                        decs = decs
                            .into_iter()
                            .flat_map(|d| {
                                pre.iter()
                                    .map(|&u| {
                                        let mut d2 = d.clone();
                                        d2.add_kappa(u, a);
                                        d2
                                    })
                                    .collect::<Vec<_>>()
                            })
                            .collect();
                    }
                }
                for d in decs {
                    out.add_term(self.split(ag, &d), w.clone());
                }
            }
        }
        if c >= 1 {
            let idx = self.index(c - 1);
            for &gi in idx.by_j.get(&key).into_iter().flatten() {
                let ag = &idx.graphs[gi];
                let glued = glue_legs(&ag.union, &self.cut[0], &self.cut[1])?;
                let ne = glued.n_edges() - 1;
                let isos = isomorphisms(&glued, &gamma);
                let w = Q::new((-1).into(), (isos.len() as i64).into());
                for phi in &isos {
                    let mut base = Decorated::bare(ag.union.clone());
                    for e in 0..ne {
                        for s in 0..2u8 {
                            base.add_psi(&HalfEdge::Edge(e, s), deco.psi(&phi.map_half(&HalfEdge::Edge(e, s))));
                        }
                    }
                    for s in 0..2u8 {
                        let p = deco.psi(&phi.map_half(&HalfEdge::Edge(ne, s)));
                        base.add_psi(&HalfEdge::Leg(self.cut[s as usize].clone()), p);
                    }
                    for leg in glued.legs.keys() {
                        base.add_psi(&HalfEdge::Leg(leg.clone()), deco.psi(&HalfEdge::Leg(leg.clone())));
                    }
                    for u in 0..ag.union.n_vertices() {
                        for &a in &deco.kappa[phi.vmap[u]] {
                            base.add_kappa(u, a);
                        }
                    }
                    // excess class c1(N) = -psi_{cut0} - psi_{cut1}
                    for s in 0..2 {
                        let mut d = base.clone();
                        d.add_psi(&HalfEdge::Leg(self.cut[s].clone()), 1);
                        out.add_term(self.split(ag, &d), w.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pullback(&self, e: &TautExpr) -> Result<TensorExpr> {
        if e.space != self.space {
            return Err(Error::AmbientMismatch(format!("{} is not {}", e.space, self.space)));
        }
        let mut out = TensorExpr::zero(&self.factors);
        for (m, c) in &e.terms {
            out.add_scaled(&self.pullback_monomial(m)?, c);
        }
        Ok(out)
    }

    /// xi_{A*} of a tensor class (no division by |Aut A|).
    pub fn pushforward(&self, t: &TensorExpr) -> Result<TautExpr> {
        if t.factors != self.factors {
            return Err(Error::AmbientMismatch("tensor factors do not match the boundary map".into()));
        }
        let mut out = TautExpr::zero(&self.space);
        for (ms, c) in &t.terms {
            let decs: Vec<Decorated> = ms.iter().map(|m| m.decorated()).collect();
            let parts: Vec<StableGraph> = decs.iter().map(|d| d.graph.clone()).collect();
            let (union, voff, _) = disjoint_union(&parts)?;
            let glued = glue_legs(&union, &self.cut[0], &self.cut[1])?;
            let mut h = Decorated::bare(glued.clone());
            let mut eidx = 0;
            for (i, d) in decs.iter().enumerate() {
                for (v, k) in d.kappa.iter().enumerate() {
                    h.kappa[voff[i] + v] = k.clone();
                }
                for ep in &d.edge_psi {
                    h.edge_psi[eidx] = *ep;
                    eidx += 1;
                }
                for (m, &p) in &d.leg_psi {
                    if let Some(s) = self.cut.iter().position(|x| x == m) {
                        h.edge_psi[glued.n_edges() - 1][s] = p;
                    } else {
                        h.leg_psi.insert(m.clone(), p);
                    }
                }
            }
            let denom: u64 = ms.iter().map(|m| m.aut()).product();
            let coef = c * Q::new((crate::graph::aut_count(&glued) as i64).into(), (denom as i64).into());
            out.add_term(h.canon(), coef);
        }
        Ok(out)
    }

    /// delta_A * e, i.e. xi_{A*} xi_A^* (e) / |Aut A|.
    pub fn times(&self, e: &TautExpr) -> Result<TautExpr> {
        let pushed = self.pushforward(&self.pullback(e)?)?;
        Ok(pushed.scaled(&Q::new(1.into(), (self.aut as i64).into())))
    }

    /// Components of the pullback with the given factor degrees.
    pub fn restrict(&self, e: &TautExpr, degrees: &[usize]) -> Result<TensorExpr> {
        Ok(self.pullback(e)?.component(degrees))
    }

    /// Mumford decoration of a decorated copy of the divisor graph, split by factor.
    pub(crate) fn factor_decorations(&self, d: &Decorated) -> Vec<(Vec<u8>, BTreeMap<Marking, u8>)> {
        (0..self.divisor.n_vertices())
            .map(|v| {
                let mut psi = BTreeMap::new();
                for h in self.divisor.half_edges_at(v) {
                    let p = d.psi(&h);
                    if p == 0 {
                        continue;
                    }
                    let name = match &h {
                        HalfEdge::Leg(m) => m.clone(),
                        HalfEdge::Edge(_, s) => self.cut[*s as usize].clone(),
                    };
                    psi.insert(name, p);
                }
                (d.kappa[v].clone(), psi)
            })
            .collect()
    }
}

type MapKey = (Space, StableGraph);

fn cache() -> &'static Mutex<HashMap<MapKey, Arc<BoundaryMap>>> {
    static CACHE: OnceLock<Mutex<HashMap<MapKey, Arc<BoundaryMap>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared, lazily indexed boundary map for the given divisor graph.
pub fn boundary_map(space: &Space, divisor: &StableGraph) -> Result<Arc<BoundaryMap>> {
    let key = (space.clone(), divisor.clone());
    if let Some(m) = cache().lock().unwrap().get(&key) {
        return Ok(m.clone());
    }
    let m = Arc::new(BoundaryMap::new(space, divisor)?);
    cache().lock().unwrap().insert(key, m.clone());
    Ok(m)
}
