use super::{HalfEdge, StableGraph};
use crate::marking::Marking;
use itertools::Itertools;
use std::collections::BTreeMap;

/// Canonical encoding of a (possibly decorated) graph. Two decorated graphs
/// are isomorphic (fixing legs) iff their keys are equal.
///
/// `verts[i]` is (genus, kappa indices), `legs` lists (marking, vertex, psi
/// exponent) in marking order and `edges` lists (u, psi_u, v, psi_v) with
/// (u, psi_u) <= (v, psi_v), sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonKey {
    pub verts: Vec<(u32, Vec<u8>)>,
    pub legs: Vec<(Marking, usize, u8)>,
    pub edges: Vec<(usize, u8, usize, u8)>,
}

impl CanonKey {
    pub fn graph(&self) -> StableGraph {
        StableGraph {
            genera: self.verts.iter().map(|v| v.0).collect(),
            edges: self.edges.iter().map(|e| (e.0, e.2)).collect(),
            legs: self.legs.iter().map(|l| (l.0.clone(), l.1)).collect(),
        }
    }

    pub fn kappa(&self) -> Vec<Vec<u8>> {
        self.verts.iter().map(|v| v.1.clone()).collect()
    }

    pub fn edge_psi(&self) -> Vec<[u8; 2]> {
        self.edges.iter().map(|e| [e.1, e.3]).collect()
    }

    pub fn leg_psi(&self) -> BTreeMap<Marking, u8> {
        self.legs.iter().filter(|l| l.2 > 0).map(|l| (l.0.clone(), l.2)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct VertexKey {
    genus: u32,
    kappa: Vec<u8>,
    legs: Vec<(Marking, u8)>,
    degree: usize,
    loops: usize,
    edge_psi: Vec<u8>,
}

fn vertex_keys(
    g: &StableGraph,
    kappa: &[Vec<u8>],
    leg_psi: &BTreeMap<Marking, u8>,
    edge_psi: &[[u8; 2]],
) -> Vec<VertexKey> {
    (0..g.n_vertices())
        .map(|v| {
            let legs = g
                .legs
                .iter()
                .filter(|(_, &w)| w == v)
                .map(|(m, _)| (m.clone(), leg_psi.get(m).copied().unwrap_or(0)))
                .collect();
            let mut ep = Vec::new();
            for (e, &(a, b)) in g.edges.iter().enumerate() {
                if a == v {
                    ep.push(edge_psi[e][0]);
                }
                if b == v {
                    ep.push(edge_psi[e][1]);
                }
            }
            ep.sort();
            VertexKey {
                genus: g.genera[v],
                kappa: kappa[v].clone(),
                legs,
                degree: g.valence(v),
                loops: g.loops_at(v),
                edge_psi: ep,
            }
        })
        .collect()
}

/// All vertex orders (new index -> old vertex) that respect the invariant
/// partition, i.e. sort vertices by key and permute only inside key classes.
fn candidate_orders(keys: &[VertexKey]) -> Vec<Vec<usize>> {
    let mut sorted: Vec<usize> = (0..keys.len()).collect();
    sorted.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let groups: Vec<Vec<usize>> = sorted
        .into_iter()
        .group_by(|&v| keys[v].clone())
        .into_iter()
        .map(|(_, grp)| grp.collect())
        .collect();
    groups
        .iter()
        .map(|grp| grp.iter().copied().permutations(grp.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|parts| parts.concat())
        .collect()
}

fn encode(
    g: &StableGraph,
    kappa: &[Vec<u8>],
    leg_psi: &BTreeMap<Marking, u8>,
    edge_psi: &[[u8; 2]],
    order: &[usize],
) -> CanonKey {
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let verts = order.iter().map(|&v| (g.genera[v], kappa[v].clone())).collect();
    let legs = g
        .legs
        .iter()
        .map(|(m, &v)| (m.clone(), pos[v], leg_psi.get(m).copied().unwrap_or(0)))
        .collect();
    let mut edges: Vec<(usize, u8, usize, u8)> = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let x = (pos[a], edge_psi[e][0]);
            let y = (pos[b], edge_psi[e][1]);
            if x <= y {
                (x.0, x.1, y.0, y.1)
            } else {
                (y.0, y.1, x.0, x.1)
            }
        })
        .collect();
    edges.sort();
    CanonKey { verts, legs, edges }
}

/// Canonical key of a decorated graph.
pub fn canonicalize(
    g: &StableGraph,
    kappa: &[Vec<u8>],
    leg_psi: &BTreeMap<Marking, u8>,
    edge_psi: &[[u8; 2]],
) -> CanonKey {
    let keys = vertex_keys(g, kappa, leg_psi, edge_psi);
    candidate_orders(&keys)
        .iter()
        .map(|o| encode(g, kappa, leg_psi, edge_psi, o))
        .min()
        .expect("graph has at least one vertex")
}

fn blank(g: &StableGraph) -> (Vec<Vec<u8>>, BTreeMap<Marking, u8>, Vec<[u8; 2]>) {
    (vec![Vec::new(); g.n_vertices()], BTreeMap::new(), vec![[0, 0]; g.n_edges()])
}

/// Canonical key of the undecorated graph.
pub fn canonical_key(g: &StableGraph) -> CanonKey {
    let (k, l, e) = blank(g);
    canonicalize(g, &k, &l, &e)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Order of the automorphism group of the undecorated graph, acting on
/// half-edges and fixing every leg.
pub fn aut_count(g: &StableGraph) -> u64 {
    let (k, l, e) = blank(g);
    let keys = vertex_keys(g, &k, &l, &e);
    let encodings: Vec<CanonKey> = candidate_orders(&keys).iter().map(|o| encode(g, &k, &l, &e, o)).collect();
    let best = encodings.iter().min().expect("nonempty");
    let vertex_level = encodings.iter().filter(|c| *c == best).count() as u64;
    let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(a, b) in &g.edges {
        *mult.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let edge_level: u64 = mult
        .iter()
        .map(|(&(a, b), &m)| if a == b { factorial(m) << m } else { factorial(m) })
        .product();
    vertex_level * edge_level
}

/// A half-edge level isomorphism: `vmap[v]` is the image vertex and
/// `emap[e] = (e', flipped)` sends side i of e to side i^flipped of e'.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iso {
    pub vmap: Vec<usize>,
    pub emap: Vec<(usize, bool)>,
}

impl Iso {
    pub fn map_half(&self, h: &HalfEdge) -> HalfEdge {
        match h {
            HalfEdge::Leg(m) => HalfEdge::Leg(m.clone()),
            HalfEdge::Edge(e, side) => {
                let (t, flip) = self.emap[*e];
                HalfEdge::Edge(t, side ^ flip as u8)
            }
        }
    }
}

/// All isomorphisms x -> y of undecorated graphs fixing legs.
pub fn isomorphisms(x: &StableGraph, y: &StableGraph) -> Vec<Iso> {
    if x.n_vertices() != y.n_vertices() || x.n_edges() != y.n_edges() || x.legs.len() != y.legs.len() {
        return Vec::new();
    }
    let (kx, lx, ex) = blank(x);
    let (ky, ly, ey) = blank(y);
    let keys_x = vertex_keys(x, &kx, &lx, &ex);
    let keys_y = vertex_keys(y, &ky, &ly, &ey);
    let mut sx: Vec<usize> = (0..keys_x.len()).collect();
    sx.sort_by(|&a, &b| keys_x[a].cmp(&keys_x[b]));
    let mut out = Vec::new();
    for oy in candidate_orders(&keys_y) {
        let mut vmap = vec![0; x.n_vertices()];
        let mut ok = true;
        for (i, &v) in sx.iter().enumerate() {
            if keys_x[v] != keys_y[oy[i]] {
                ok = false;
                break;
            }
            vmap[v] = oy[i];
        }
        if !ok {
            continue;
        }
        if x.legs.iter().any(|(m, &v)| y.legs.get(m) != Some(&vmap[v])) {
            continue;
        }
        if x.n_edges() == 0 {
            out.push(Iso { vmap, emap: Vec::new() });
            continue;
        }
        let mut gx: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, &(a, b)) in x.edges.iter().enumerate() {
            let (u, w) = (vmap[a], vmap[b]);
            gx.entry((u.min(w), u.max(w))).or_default().push(e);
        }
        let mut gy: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, &(a, b)) in y.edges.iter().enumerate() {
            gy.entry((a.min(b), a.max(b))).or_default().push(e);
        }
        if gx.len() != gy.len() || gx.iter().any(|(k, v)| gy.get(k).map(|w| w.len()) != Some(v.len())) {
            continue;
        }
        // For each pair class: every bijection of parallel edges, and for
        // loops every choice of orientation.
        let mut choices: Vec<Vec<Vec<(usize, usize, bool)>>> = Vec::new();
        for (pair, xs) in &gx {
            let ys = &gy[pair];
            let mut opts = Vec::new();
            for perm in ys.iter().copied().permutations(ys.len()) {
                if pair.0 == pair.1 {
                    for flips in 0..(1u32 << xs.len()) {
                        opts.push(
                            xs.iter()
                                .zip(&perm)
                                .enumerate()
                                .map(|(i, (&a, &b))| (a, b, flips >> i & 1 == 1))
                                .collect(),
                        );
                    }
                } else {
                    opts.push(
                        xs.iter()
                            .zip(&perm)
                            .map(|(&a, &b)| (a, b, vmap[x.edges[a].0] != y.edges[b].0))
                            .collect(),
                    );
                }
            }
            choices.push(opts);
        }
        for combo in choices.into_iter().multi_cartesian_product() {
            let mut emap = vec![(0, false); x.n_edges()];
            for (a, b, f) in combo.into_iter().flatten() {
                emap[a] = (b, f);
            }
            out.push(Iso { vmap: vmap.clone(), emap });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marking::markings;

    #[test]
    fn aut_of_basic_graphs() {
        let irr = StableGraph::new(vec![1], vec![(0, 0)], BTreeMap::new()).unwrap();
        assert_eq!(aut_count(&irr), 2);
        let f = StableGraph::new(vec![0], vec![(0, 0), (0, 0)], [(markings(&["1"])[0].clone(), 0)].into()).unwrap();
        assert_eq!(aut_count(&f), 8);
        assert_eq!(isomorphisms(&f, &f).len(), 8);
        let sym = StableGraph::new(vec![1, 1], vec![(0, 1)], BTreeMap::new()).unwrap();
        assert_eq!(aut_count(&sym), 2);
        assert_eq!(isomorphisms(&sym, &sym).len(), 2);
    }

    #[test]
    fn canonical_key_ignores_vertex_order() {
        let p = markings(&["1", "2"]);
        let a = StableGraph::new(vec![0, 2], vec![(0, 1)], [(p[0].clone(), 0), (p[1].clone(), 0)].into()).unwrap();
        let b = StableGraph::new(vec![2, 0], vec![(1, 0)], [(p[0].clone(), 1), (p[1].clone(), 1)].into()).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }
}
