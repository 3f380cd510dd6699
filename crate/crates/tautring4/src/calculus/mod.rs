//! Products, boundary pullbacks and pushforwards, forgetful pullbacks.

mod boundary;
mod forget;
mod product;

pub use boundary::{boundary_map, BoundaryMap};
pub use forget::{forget_pullback, forget_pullback_many};
pub use product::{multiply, mumford_times, power};

use crate::error::Result;
use crate::expr::{Decorated, Monomial};
use crate::graph::{aut_count, substitute, HalfEdge};
use crate::marking::Marking;
use crate::Q;
use std::collections::BTreeMap;

/// Replaces vertex `v` of the decorated graph `outer` by the decorated class
/// `inner`, whose legs stand for the half-edges at `v` via `attach`. Returns
/// the factor c with [outer; inner at v] = c [H; combined decoration], both
/// sides in the normalized convention.
pub(crate) fn insert_at_vertex(
    outer: &Decorated,
    v: usize,
    inner: &Monomial,
    attach: &BTreeMap<Marking, HalfEdge>,
) -> Result<(Q, Monomial)> {
    let inner_d = inner.decorated();
    let sub = substitute(&outer.graph, v, &inner_d.graph, attach)?;
    let mut h = Decorated::bare(sub.graph.clone());
    for (w, nw) in sub.outer_vmap.iter().enumerate() {
        if let Some(nw) = nw {
            h.kappa[*nw] = outer.kappa[w].clone();
        }
    }
    for (i, &nw) in sub.inner_vmap.iter().enumerate() {
        for &a in &inner_d.kappa[i] {
            h.add_kappa(nw, a);
        }
    }
    for e in 0..outer.graph.n_edges() {
        h.edge_psi[e] = outer.edge_psi[e];
    }
    for (i, ep) in inner_d.edge_psi.iter().enumerate() {
        h.edge_psi[sub.inner_edge_offset + i] = *ep;
    }
    for (m, &p) in &outer.leg_psi {
        h.add_psi(&HalfEdge::Leg(m.clone()), p);
    }
    for (m, target) in attach {
        let p = inner_d.psi(&HalfEdge::Leg(m.clone()));
        h.add_psi(target, p);
    }
    let coef = Q::new(
        (aut_count(&sub.graph) as i64).into(),
        ((aut_count(&outer.graph) * aut_count(&inner_d.graph)) as i64).into(),
    );
    Ok((coef, h.canon()))
}
