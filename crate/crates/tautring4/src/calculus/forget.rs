use super::insert_at_vertex;
use super::product::multiply;
use crate::error::{Error, Result};
use crate::expr::{Decorated, Monomial, Space, TautExpr};
use crate::graph::{aut_count, Family, HalfEdge};
use crate::marking::{fresh_aux, Marking, AUX_Q};
use crate::Q;
use num_traits::One;
use std::collections::BTreeMap;

/// pi_x^* of a degree-one Mumford atom on `space` (which lacks x).
fn pull_atom(target: &Space, x: &Marking, kappa: Option<u8>, psi: Option<&Marking>) -> Result<TautExpr> {
    let mut out = TautExpr::zero(target);
    if let Some(a) = kappa {
        out.add_term(Monomial::mumford(target, vec![a], BTreeMap::new()), Q::one());
        out.add_term(Monomial::mumford(target, vec![], [(x.clone(), a)].into()), -Q::one());
    }
    if let Some(h) = psi {
        out.add_term(Monomial::mumford(target, vec![], [(h.clone(), 1)].into()), Q::one());
        let d = Family::Sep { a: 0, side: vec![h.clone(), x.clone()] }.build(target.genus, &target.markings)?;
        out.add_term(Monomial::stratum(&d), -Q::one());
    }
    Ok(out)
}

/// pi_x^* of the Mumford monomial (kappa, psi) living on `target` minus x.
fn pull_mumford(target: &Space, x: &Marking, kappa: &[u8], psi: &BTreeMap<Marking, u8>) -> Result<TautExpr> {
    let mut acc = TautExpr::one(target);
    for &a in kappa {
        acc = multiply(&acc, &pull_atom(target, x, Some(a), None)?)?;
    }
    for (h, &e) in psi {
        for _ in 0..e {
            acc = multiply(&acc, &pull_atom(target, x, None, Some(h))?)?;
        }
    }
    Ok(acc)
}

fn pull_monomial(target: &Space, x: &Marking, m: &Monomial) -> Result<TautExpr> {
    let d = m.decorated();
    let gamma = &d.graph;
    let aut_gamma = aut_count(gamma);
    let mut out = TautExpr::zero(target);
    for v in 0..gamma.n_vertices() {
        let mut gv = gamma.clone();
        gv.legs.insert(x.clone(), v);
        let mut outer = Decorated { graph: gv.clone(), ..d.clone() };
        // move the local decoration at v into a class on the vertex factor
        let mut taken = target.markings.clone();
        let halves = gamma.half_edges_at(v);
        let mut attach = BTreeMap::new();
        let mut local_psi = BTreeMap::new();
        let mut names = Vec::new();
        for h in &halves {
            let name = match h {
                HalfEdge::Leg(l) => l.clone(),
                HalfEdge::Edge(..) => {
                    let n = fresh_aux(&taken, 1, AUX_Q).remove(0);
                    taken.push(n.clone());
                    n
                }
            };
            let p = d.psi(h);
            if p > 0 {
                local_psi.insert(name.clone(), p);
            }
            match h {
                HalfEdge::Leg(l) => {
                    outer.leg_psi.remove(l);
                }
                HalfEdge::Edge(e, s) => outer.edge_psi[*e][*s as usize] = 0,
            }
            attach.insert(name.clone(), h.clone());
            names.push(name);
        }
        attach.insert(x.clone(), HalfEdge::Leg(x.clone()));
        names.push(x.clone());
        let local_kappa = std::mem::take(&mut outer.kappa[v]);
        let factor = Space::new(gamma.genera[v], &names)?;
        let pulled = pull_mumford(&factor, x, &local_kappa, &local_psi)?;
        for (q, cq) in &pulled.terms {
            let (k, h) = insert_at_vertex(&outer, v, q, &attach)?;
            let coef = cq * k * Q::new((aut_count(&gv) as i64).into(), (aut_gamma as i64).into());
            out.add_term(h, coef);
        }
    }
    Ok(out)
}

/// pi_x^* : T(M_{g,P}) -> T(M_{g,P+x}).
pub fn forget_pullback(e: &TautExpr, x: &Marking) -> Result<TautExpr> {
    if e.space.markings.contains(x) {
        return Err(Error::AmbientMismatch(format!("marking {x} already present")));
    }
    let target = e.space.with(std::slice::from_ref(x))?;
    let mut out = TautExpr::zero(&target);
    for (m, c) in &e.terms {
        out.add_scaled(&pull_monomial(&target, x, m)?, c);
    }
    Ok(out)
}

/// Pullback forgetting several markings, one at a time in the given order.
pub fn forget_pullback_many(e: &TautExpr, xs: &[Marking]) -> Result<TautExpr> {
    let mut acc = e.clone();
    for x in xs {
        acc = forget_pullback(&acc, x)?;
    }
    Ok(acc)
}

