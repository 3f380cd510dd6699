use super::{HalfEdge, StableGraph};
use crate::error::{Error, Result};
use crate::marking::Marking;
use std::collections::BTreeMap;

/// Disjoint union. Returns the union and the vertex and edge offsets of each part.
pub fn disjoint_union(parts: &[StableGraph]) -> Result<(StableGraph, Vec<usize>, Vec<usize>)> {
    let mut out = StableGraph { genera: Vec::new(), edges: Vec::new(), legs: BTreeMap::new() };
    let mut voff = Vec::new();
    let mut eoff = Vec::new();
    for p in parts {
        let vo = out.genera.len();
        voff.push(vo);
        eoff.push(out.edges.len());
        out.genera.extend(&p.genera);
        out.edges.extend(p.edges.iter().map(|&(a, b)| (a + vo, b + vo)));
        for (m, &v) in &p.legs {
            if out.legs.insert(m.clone(), v + vo).is_some() {
                return Err(Error::Gluing(format!("marking {m} appears in two parts")));
            }
        }
    }
    Ok((out, voff, eoff))
}

/// Joins legs `s` and `t` into a new edge, appended last with side 0 at `s`.
pub fn glue_legs(g: &StableGraph, s: &Marking, t: &Marking) -> Result<StableGraph> {
    if s == t {
        return Err(Error::Gluing(format!("cannot glue {s} to itself")));
    }
    let mut h = g.clone();
    let vs = h.legs.remove(s).ok_or_else(|| Error::Gluing(format!("no leg {s}")))?;
    let vt = h.legs.remove(t).ok_or_else(|| Error::Gluing(format!("no leg {t}")))?;
    h.edges.push((vs, vt));
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: StableGraph,
    pub vmap: Vec<usize>,
    pub emap: Vec<Option<usize>>,
}

/// Contracts edge `e`. A loop raises the genus of its vertex; otherwise the
/// two endpoints merge into the lower-numbered one.
pub fn contract_edge(g: &StableGraph, e: usize) -> Result<Contraction> {
    let &(a, b) = g.edges.get(e).ok_or_else(|| Error::Contraction(format!("no edge {e}")))?;
    let emap: Vec<Option<usize>> = (0..g.n_edges())
        .map(|i| match i.cmp(&e) {
            std::cmp::Ordering::Less => Some(i),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(i - 1),
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = g.edges.clone();
    edges.remove(e);
    if a == b {
        let mut genera = g.genera.clone();
        genera[a] += 1;
        let graph = StableGraph { genera, edges, legs: g.legs.clone() };
        return Ok(Contraction { graph, vmap: (0..g.n_vertices()).collect(), emap });
    }
    let (keep, drop) = (a.min(b), a.max(b));
    let vmap: Vec<usize> = (0..g.n_vertices())
        .map(|v| {
            if v == drop {
                keep
            } else if v > drop {
                v - 1
            } else {
                v
            }
        })
        .collect();
    let mut genera = g.genera.clone();
    genera[keep] += genera[drop];
    genera.remove(drop);
    let edges = edges.into_iter().map(|(x, y)| (vmap[x], vmap[y])).collect();
    let legs = g.legs.iter().map(|(m, &v)| (m.clone(), vmap[v])).collect();
    Ok(Contraction { graph: StableGraph { genera, edges, legs }, vmap, emap })
}

#[derive(Clone, Debug)]
pub struct Substitution {
    pub graph: StableGraph,
    /// Outer vertex -> new vertex (None for the replaced vertex).
    pub outer_vmap: Vec<Option<usize>>,
    pub inner_vmap: Vec<usize>,
    /// Outer edges keep their indices; inner edge i becomes `inner_edge_offset + i`.
    pub inner_edge_offset: usize,
}

/// Replaces vertex `v` of `outer` by the graph `inner`. `attach` sends every
/// leg of `inner` to the half-edge of `outer` at `v` it stands for.
pub fn substitute(
    outer: &StableGraph,
    v: usize,
    inner: &StableGraph,
    attach: &BTreeMap<Marking, HalfEdge>,
) -> Result<Substitution> {
    let at_v = outer.half_edges_at(v);
    if attach.len() != inner.legs.len() || at_v.len() != attach.len() {
        return Err(Error::Gluing(format!(
            "vertex {v} has {} half-edges but the inserted graph has {} legs",
            at_v.len(),
            inner.legs.len()
        )));
    }
    for h in attach.values() {
        if !at_v.contains(h) {
            return Err(Error::Gluing(format!("{h:?} is not a half-edge at vertex {v}")));
        }
    }
    let mut outer_vmap = vec![None; outer.n_vertices()];
    let mut genera = Vec::new();
    for w in 0..outer.n_vertices() {
        if w != v {
            outer_vmap[w] = Some(genera.len());
            genera.push(outer.genera[w]);
        }
    }
    let base = genera.len();
    genera.extend(&inner.genera);
    let inner_vmap: Vec<usize> = (0..inner.n_vertices()).map(|i| base + i).collect();
    let mut side_target: BTreeMap<HalfEdge, usize> = BTreeMap::new();
    for (m, h) in attach {
        let iv = *inner.legs.get(m).ok_or_else(|| Error::Gluing(format!("inserted graph has no leg {m}")))?;
        side_target.insert(h.clone(), inner_vmap[iv]);
    }
    let mut edges = Vec::new();
    for (e, &(a, b)) in outer.edges.iter().enumerate() {
        let na = if a == v { side_target[&HalfEdge::Edge(e, 0)] } else { outer_vmap[a].unwrap() };
        let nb = if b == v { side_target[&HalfEdge::Edge(e, 1)] } else { outer_vmap[b].unwrap() };
        edges.push((na, nb));
    }
    let inner_edge_offset = edges.len();
    edges.extend(inner.edges.iter().map(|&(a, b)| (inner_vmap[a], inner_vmap[b])));
    let mut legs = BTreeMap::new();
    for (m, &w) in &outer.legs {
        if w != v {
            legs.insert(m.clone(), outer_vmap[w].unwrap());
        } else {
            legs.insert(m.clone(), side_target[&HalfEdge::Leg(m.clone())]);
        }
    }
    Ok(Substitution {
        graph: StableGraph { genera, edges, legs },
        outer_vmap,
        inner_vmap,
        inner_edge_offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_key;
    use crate::marking::markings;

    #[test]
    fn glue_then_contract_is_identity_on_trivial() {
        let p = markings(&["1"]);
        let mut legs: Vec<Marking> = p.clone();
        legs.push(Marking::q());
        legs.push(Marking::r());
        let factor = StableGraph::trivial(1, &legs);
        let irr = glue_legs(&factor, &Marking::q(), &Marking::r()).unwrap();
        assert_eq!(irr.genus(), 2);
        let c = contract_edge(&irr, 0).unwrap();
        assert_eq!(canonical_key(&c.graph), canonical_key(&StableGraph::trivial(2, &p)));
    }

    #[test]
    fn substitute_divisor_into_loop_vertex() {
        let irr = StableGraph::new(vec![1], vec![(0, 0)], BTreeMap::new()).unwrap();
        let (q, r, s, t) = (Marking::q(), Marking::r(), Marking::s(), Marking::t());
        // genus-1 factor (q, r) replaced by genus 0 carrying q,r glued to genus 1
        let inner = StableGraph::new(vec![0, 1], vec![(0, 1)], [(q.clone(), 0), (r.clone(), 0)].into()).unwrap();
        let _ = (s, t);
        let attach = [(q, HalfEdge::Edge(0, 0)), (r, HalfEdge::Edge(0, 1))].into();
        let h = substitute(&irr, 0, &inner, &attach).unwrap();
        assert_eq!(h.graph.genus(), 2);
        assert_eq!(h.graph.n_edges(), 2);
        assert!(h.graph.is_stable());
    }
}
