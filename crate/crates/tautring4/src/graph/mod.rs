//! Stable graphs: vertices with genera, edges, and legs labelled by markings.

mod canon;
mod enumerate;
mod ops;

pub use canon::{aut_count, canonical_key, canonicalize, isomorphisms, CanonKey, Iso};
pub use enumerate::{enumerate, Family, NamedGraph};
pub use ops::{contract_edge, disjoint_union, glue_legs, substitute, Contraction, Substitution};

use crate::error::{Error, Result};
use crate::marking::Marking;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HalfEdge {
    Leg(Marking),
    /// Side 0 sits at `edges[e].0`, side 1 at `edges[e].1`.
    Edge(usize, u8),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableGraph {
    pub genera: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
    pub legs: BTreeMap<Marking, usize>,
}

impl StableGraph {
    pub fn trivial(genus: u32, markings: &[Marking]) -> Self {
        StableGraph {
            genera: vec![genus],
            edges: Vec::new(),
            legs: markings.iter().map(|m| (m.clone(), 0)).collect(),
        }
    }

    /// Builds a graph and checks connectivity-independent well-formedness and stability.
    pub fn new(genera: Vec<u32>, edges: Vec<(usize, usize)>, legs: BTreeMap<Marking, usize>) -> Result<Self> {
        let g = StableGraph { genera, edges, legs };
        let n = g.genera.len();
        if n == 0 {
            return Err(Error::Unstable("graph without vertices".into()));
        }
        for &(a, b) in &g.edges {
            if a >= n || b >= n {
                return Err(Error::Parse(format!("edge ({a},{b}) refers to a missing vertex")));
            }
        }
        for (m, &v) in &g.legs {
            if v >= n {
                return Err(Error::Parse(format!("leg {m} sits on missing vertex {v}")));
            }
        }
        if let Some(v) = (0..n).find(|&v| !g.vertex_stable(v)) {
            return Err(Error::Unstable(format!(
                "vertex {v} has genus {} and valence {}",
                g.genera[v],
                g.valence(v)
            )));
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn codim(&self) -> usize {
        self.edges.len()
    }

    pub fn markings(&self) -> Vec<Marking> {
        self.legs.keys().cloned().collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        let legs = self.legs.values().filter(|&&w| w == v).count();
        let halves: usize = self
            .edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum();
        legs + halves
    }

    pub fn vertex_stable(&self, v: usize) -> bool {
        2 * self.genera[v] as usize + self.valence(v) >= 3
    }

    pub fn is_stable(&self) -> bool {
        (0..self.n_vertices()).all(|v| self.vertex_stable(v))
    }

    pub fn vertex_of(&self, h: &HalfEdge) -> usize {
        match h {
            HalfEdge::Leg(m) => self.legs[m],
            HalfEdge::Edge(e, 0) => self.edges[*e].0,
            HalfEdge::Edge(e, _) => self.edges[*e].1,
        }
    }

    /// Half-edges at `v`: legs first (in marking order), then edge sides.
    pub fn half_edges_at(&self, v: usize) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> = self
            .legs
            .iter()
            .filter(|(_, &w)| w == v)
            .map(|(m, _)| HalfEdge::Leg(m.clone()))
            .collect();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a == v {
                out.push(HalfEdge::Edge(e, 0));
            }
            if b == v {
                out.push(HalfEdge::Edge(e, 1));
            }
        }
        out
    }

    pub fn half_edges(&self) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> = self.legs.keys().map(|m| HalfEdge::Leg(m.clone())).collect();
        for e in 0..self.edges.len() {
            out.push(HalfEdge::Edge(e, 0));
            out.push(HalfEdge::Edge(e, 1));
        }
        out
    }

    pub fn legs_at(&self, v: usize) -> Vec<Marking> {
        self.legs.iter().filter(|(_, &w)| w == v).map(|(m, _)| m.clone()).collect()
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// First Betti number |E| - |V| + #components.
    pub fn betti(&self) -> usize {
        self.edges.len() + self.components().len() - self.n_vertices()
    }

    /// Arithmetic genus of a connected graph.
    pub fn genus(&self) -> u32 {
        self.betti() as u32 + self.genera.iter().sum::<u32>()
    }

    /// Splits into connected components; each component keeps the legs on its
    /// vertices and its internal edges, renumbered in the original order.
    pub fn split_components(&self) -> Vec<(StableGraph, Vec<usize>)> {
        self.components()
            .into_iter()
            .map(|verts| {
                let mut pos = vec![usize::MAX; self.n_vertices()];
                for (i, &v) in verts.iter().enumerate() {
                    pos[v] = i;
                }
                let genera = verts.iter().map(|&v| self.genera[v]).collect();
                let edges = self
                    .edges
                    .iter()
                    .filter(|&&(a, _)| pos[a] != usize::MAX)
                    .map(|&(a, b)| (pos[a], pos[b]))
                    .collect();
                let legs = self
                    .legs
                    .iter()
                    .filter(|(_, &v)| pos[v] != usize::MAX)
                    .map(|(m, &v)| (m.clone(), pos[v]))
                    .collect();
                (StableGraph { genera, edges, legs }, verts)
            })
            .collect()
    }

    /// Applies an injective relabelling of the legs.
    pub fn relabel(&self, map: &BTreeMap<Marking, Marking>) -> StableGraph {
        let legs = self
            .legs
            .iter()
            .map(|(m, &v)| (map.get(m).cloned().unwrap_or_else(|| m.clone()), v))
            .collect();
        StableGraph { genera: self.genera.clone(), edges: self.edges.clone(), legs }
    }
}

/// Stability of the space itself: 2g - 2 + n > 0.
pub fn space_is_stable(genus: u32, n: usize) -> bool {
    2 * genus as i64 - 2 + n as i64 > 0
}

/// Complex dimension 3g - 3 + n.
pub fn space_dim(genus: u32, n: usize) -> i64 {
    3 * genus as i64 - 3 + n as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marking::markings;

    #[test]
    fn genus_and_stability() {
        let p = markings(&["1"]);
        let g = StableGraph::new(vec![0], vec![(0, 0), (0, 0)], [(p[0].clone(), 0)].into()).unwrap();
        assert_eq!(g.genus(), 2);
        assert!(StableGraph::new(vec![0], vec![(0, 0)], BTreeMap::new()).is_err());
        let two = StableGraph::new(vec![1, 0], vec![(0, 1), (0, 1)], [(p[0].clone(), 1)].into()).unwrap();
        assert_eq!(two.genus(), 2);
        assert_eq!(two.betti(), 1);
    }
}
