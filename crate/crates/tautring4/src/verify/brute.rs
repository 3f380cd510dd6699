//! Slow reference implementations used to cross-check the graph machinery
//! and the dimension count: exhaustive generation of stable graphs,
//! isomorphism by trying every vertex permutation, and automorphisms by
//! trying every permutation of edge half-edges.

use crate::graph::{space_is_stable, StableGraph};
use crate::marking::Marking;
use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet};

/// Sorted (genera, edges, legs) after renaming vertices by `perm`.
type Shape = (Vec<u32>, Vec<(usize, usize)>, Vec<(Marking, usize)>);

fn shape_under(g: &StableGraph, perm: &[usize]) -> Shape {
    let mut genera = vec![0; g.genera.len()];
    for (v, &h) in g.genera.iter().enumerate() {
        genera[perm[v]] = h;
    }
    let mut edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort();
    let legs = g.legs.iter().map(|(m, &v)| (m.clone(), perm[v])).collect();
    (genera, edges, legs)
}

/// The smallest shape over all vertex relabellings.
pub fn brute_form(g: &StableGraph) -> Shape {
    (0..g.genera.len())
        .permutations(g.genera.len())
        .map(|p| shape_under(g, &p))
        .min()
        .expect("a graph has at least one vertex")
}

pub fn brute_isomorphic(x: &StableGraph, y: &StableGraph) -> bool {
    x.genera.len() == y.genera.len() && x.edges.len() == y.edges.len() && brute_form(x) == brute_form(y)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == v && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn stable(n: usize, genera: &[u32], edges: &[(usize, usize)], legs: &[usize]) -> bool {
    (0..n).all(|v| {
        let val = edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>()
            + legs.iter().filter(|&&w| w == v).count();
        2 * genera[v] as usize + val >= 3
    })
}

fn genus_splits(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|h| {
            genus_splits(total - h, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, h);
                rest
            })
        })
        .collect()
}

/// All maps from `k` legs to `n` vertices.
fn assignments(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n.pow(k as u32))
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let v = code % n;
                    code /= n;
                    v
                })
                .collect()
        })
        .collect()
}

/// Every connected stable graph with `edges` edges, one per isomorphism
/// class, found by generating all structures and merging isomorphic ones.
pub fn brute_graphs(g: u32, markings: &[Marking], edges: usize) -> Vec<StableGraph> {
    let mut classes: BTreeMap<Shape, StableGraph> = BTreeMap::new();
    if !space_is_stable(g, markings.len()) {
        return Vec::new();
    }
    for n in 1..=edges + 1 {
        let betti = edges + 1 - n;
        if betti as u32 > g {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        for es in pairs.iter().cloned().combinations_with_replacement(edges) {
            if !connected(n, &es) {
                continue;
            }
            for genera in genus_splits(g - betti as u32, n) {
                for legs in assignments(markings.len(), n) {
                    if !stable(n, &genera, &es, &legs) {
                        continue;
                    }
                    let graph = StableGraph {
                        genera: genera.clone(),
                        edges: es.clone(),
                        legs: markings.iter().cloned().zip(legs.iter().cloned()).collect(),
                    };
                    classes.entry(brute_form(&graph)).or_insert(graph);
                }
            }
        }
    }
    classes.into_values().collect()
}

/// An automorphism as a vertex permutation and a permutation of edge
/// half-edges, half-edge `(e, side)` numbered `2e + side`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteAut {
    pub vertices: Vec<usize>,
    pub halves: Vec<usize>,
}

fn half_vertex(g: &StableGraph, h: usize) -> usize {
    let (a, b) = g.edges[h / 2];
    if h.is_multiple_of(2) {
        a
    } else {
        b
    }
}

/// All automorphisms fixing the legs.
pub fn brute_automorphisms(g: &StableGraph) -> Vec<BruteAut> {
    let n = g.genera.len();
    let halves = 2 * g.edges.len();
    let mut out = Vec::new();
    for sigma in (0..n).permutations(n) {
        if (0..n).any(|v| g.genera[sigma[v]] != g.genera[v]) || g.legs.values().any(|&v| sigma[v] != v) {
            continue;
        }
        for tau in (0..halves).permutations(halves) {
            let pairs_ok = (0..g.edges.len()).all(|e| tau[2 * e] / 2 == tau[2 * e + 1] / 2);
            let verts_ok = (0..halves).all(|h| half_vertex(g, tau[h]) == sigma[half_vertex(g, h)]);
            if pairs_ok && verts_ok {
                out.push(BruteAut { vertices: sigma.clone(), halves: tau.clone() });
            }
        }
    }
    out
}

/// A degree-one Mumford generator on one factor of a boundary stratum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Generator {
    Kappa(usize),
    PsiLeg(Marking),
    PsiHalf(usize),
}

/// Generators of H^2 of the open factor: nothing in genus 0 and 1, psi
/// classes in genus 2, kappa_1 and psi classes from genus 3 on.
fn open_generators(g: &StableGraph) -> Vec<Generator> {
    let mut out = Vec::new();
    for (v, &h) in g.genera.iter().enumerate() {
        if h >= 3 {
            out.push(Generator::Kappa(v));
        }
        if h >= 2 {
            out.extend(g.legs.iter().filter(|(_, &w)| w == v).map(|(m, _)| Generator::PsiLeg(m.clone())));
            out.extend((0..2 * g.edges.len()).filter(|&x| half_vertex(g, x) == v).map(Generator::PsiHalf));
        }
    }
    out
}

fn act(a: &BruteAut, x: &Generator) -> Generator {
    match x {
        Generator::Kappa(v) => Generator::Kappa(a.vertices[*v]),
        Generator::PsiLeg(m) => Generator::PsiLeg(m.clone()),
        Generator::PsiHalf(h) => Generator::PsiHalf(a.halves[*h]),
    }
}

/// Dimension of the invariants of the permutation action on the open
/// generators, i.e. the number of orbits.
pub fn invariant_generators(g: &StableGraph) -> usize {
    let auts = brute_automorphisms(g);
    let gens = open_generators(g);
    let orbits: BTreeSet<BTreeSet<Generator>> =
        gens.iter().map(|x| auts.iter().map(|a| act(a, x)).collect()).collect();
    orbits.len()
}

/// Degree-two monomials in kappa_1, kappa_2 and the psi classes.
pub fn mumford_degree_two(n: usize) -> usize {
    2 + n + n * (n + 1) / 2
}

/// Relations among the boundary divisors of M_{0,m}.
fn keel_count(m: usize) -> usize {
    if m < 4 {
        0
    } else {
        m * (m - 3) / 2
    }
}

/// The terms of the dimension bound, counted separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCount {
    pub pure_boundary: usize,
    pub mumford: usize,
    pub mixed: usize,
}

impl BoundCount {
    pub fn total(&self) -> usize {
        self.pure_boundary + self.mumford + self.mixed
    }
}

/// Codimension-two strata less the Keel relations pushed from genus-zero
/// tails, plus degree-two Mumford monomials, plus invariant degree-one
/// generators on the open parts of the divisors.
pub fn bound_count(g: u32, markings: &[Marking]) -> BoundCount {
    let strata = brute_graphs(g, markings, 2).len();
    let n = markings.len();
    let keel: usize = (3..=n).map(|k| num_integer::binomial(n, k) * keel_count(k + 1)).sum();
    let mixed = brute_graphs(g, markings, 1).iter().map(invariant_generators).sum();
    BoundCount { pure_boundary: strata - keel, mumford: mumford_degree_two(n), mixed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marking::markings;

    #[test]
    fn small_counts() {
        assert_eq!(brute_graphs(2, &[], 1).len(), 2);
        assert_eq!(brute_graphs(0, &markings(&["1", "2", "3", "4"]), 1).len(), 3);
        assert_eq!(brute_graphs(1, &markings(&["1"]), 0).len(), 1);
    }

    #[test]
    fn two_loops_have_eight_automorphisms() {
        let f = StableGraph { genera: vec![0], edges: vec![(0, 0), (0, 0)], legs: BTreeMap::new() };
        assert_eq!(brute_automorphisms(&f).len(), 8);
    }

    #[test]
    fn self_glued_divisor_swaps_its_ends() {
        let irr = &brute_graphs(4, &[], 1).into_iter().find(|g| g.genera.len() == 1).unwrap();
        assert_eq!(invariant_generators(irr), 2);
    }
}
