//! Relations among divisor classes in low genus.

use crate::error::Result;
use crate::expr::{Monomial, Space, TautExpr};
use crate::graph::Family;
use crate::marking::Marking;
use crate::Q;
use num_traits::One;
use std::collections::BTreeMap;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn subsets(ms: &[Marking]) -> impl Iterator<Item = Vec<Marking>> + '_ {
    (0u64..1 << ms.len()).map(move |bits| ms.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, m)| m.clone()).collect())
}

fn divisor(space: &Space, a: u32, side: &[Marking]) -> Result<Monomial> {
    let g = Family::Sep { a, side: side.to_vec() }.build(space.genus, &space.markings)?;
    Ok(Monomial::stratum(&g))
}

/// Separating divisors with a genus-0 side, each listed once as (S, class),
/// S the markings on a genus-0 side. In genus 0 both orientations occur.
fn rational_tails(space: &Space) -> Result<Vec<(Vec<Marking>, Monomial)>> {
    let g = space.genus;
    let n = space.n();
    let mut out = Vec::new();
    for s in subsets(&space.markings) {
        let rest = n - s.len();
        if s.len() < 2 || (g == 0 && rest < 2) {
            continue;
        }
        out.push((s.clone(), divisor(space, 0, &s)?));
    }
    Ok(out)
}

fn mumford1(space: &Space, psi: Option<&Marking>) -> Monomial {
    match psi {
        None => Monomial::mumford(space, vec![1], BTreeMap::new()),
        Some(x) => Monomial::mumford(space, vec![], [(x.clone(), 1)].into()),
    }
}

/// Every separating divisor of the space, once each, with the genus of the
/// side carrying the smallest marking (or the smaller genus).
fn separating(space: &Space) -> Result<Vec<Monomial>> {
    let mut seen = BTreeMap::new();
    for a in 0..=space.genus {
        for s in subsets(&space.markings) {
            let Ok(m) = divisor(space, a, &s) else { continue };
            seen.entry(m).or_insert(());
        }
    }
    Ok(seen.into_keys().collect())
}

/// Linear relations in degree one on the space; empty for genus at least 3.
pub fn degree_one_relations(space: &Space) -> Result<Vec<TautExpr>> {
    let ms = &space.markings;
    let mut out = Vec::new();
    match space.genus {
        0 => {
            let tails = rational_tails(space)?;
            for i in ms {
                for j in ms {
                    for k in ms {
                        if i == j || i == k || j >= k {
                            continue;
                        }
                        let mut r = TautExpr::from_monomial(space, mumford1(space, Some(i)));
                        for (s, m) in &tails {
                            if s.contains(i) && !s.contains(j) && !s.contains(k) {
                                r.add_term(m.clone(), -Q::one());
                            }
                        }
                        out.push(r);
                    }
                }
            }
            for (ix, i) in ms.iter().enumerate() {
                for (jx, j) in ms.iter().enumerate().skip(ix + 1) {
                    for (kx, k) in ms.iter().enumerate().skip(jx + 1) {
                        for l in ms.iter().skip(kx + 1) {
                            // {ij|kl} = {ik|jl}, {ij|kl} = {il|jk}
                            let side = |a: &Marking, b: &Marking, c: &Marking, d: &Marking| {
                                let mut e = TautExpr::zero(space);
                                for (s, m) in &tails {
                                    if s.contains(a) && s.contains(b) && !s.contains(c) && !s.contains(d) {
                                        e.add_term(m.clone(), Q::one());
                                    }
                                }
                                e
                            };
                            let ijkl = side(i, j, k, l);
                            out.push(ijkl.sub(&side(i, k, j, l)));
                            out.push(ijkl.sub(&side(i, l, j, k)));
                        }
                    }
                }
            }
            out.push(kappa_relation(space, &Q::from_integer(0.into()), &TautExpr::zero(space))?);
        }
        1 => {
            let irr = Monomial::stratum(&Family::Irr.build(1, ms)?);
            for i in ms {
                let mut r = TautExpr::from_monomial(space, mumford1(space, Some(i)));
                r.add_term(irr.clone(), -q(1, 12));
                for (s, m) in rational_tails(space)? {
                    if s.contains(i) {
                        r.add_term(m, -Q::one());
                    }
                }
                out.push(r);
            }
            out.push(kappa_relation(space, &q(1, 12), &TautExpr::zero(space))?);
        }
        2 => {
            // 10 lambda = delta_irr + 2 delta_1
            let mut delta1 = TautExpr::zero(space);
            for m in separating(space)? {
                if m.graph().genera.iter().all(|&h| h == 1) {
                    delta1.add_term(m, q(1, 5));
                }
            }
            out.push(kappa_relation(space, &q(1, 10), &delta1)?);
        }
        _ => {}
    }
    Ok(out)
}

/// kappa_1 - 12 lambda + delta - sum psi, with lambda = c delta_irr + rest.
fn kappa_relation(space: &Space, c_irr: &Q, rest: &TautExpr) -> Result<TautExpr> {
    let mut r = TautExpr::from_monomial(space, mumford1(space, None));
    if space.genus >= 1 {
        let irr = Monomial::stratum(&Family::Irr.build(space.genus, &space.markings)?);
        r.add_term(irr, Q::one() - c_irr * Q::from_integer(12.into()));
    }
    r.add_scaled(rest, &Q::from_integer((-12).into()));
    for m in separating(space)? {
        r.add_term(m, Q::one());
    }
    for x in &space.markings {
        r.add_term(mumford1(space, Some(x)), -Q::one());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Echelon, SparseVec};
    use crate::marking::markings;

    fn rank(rows: &[TautExpr]) -> usize {
        let mut index = BTreeMap::new();
        let mut ech = Echelon::new();
        for r in rows {
            let mut v = SparseVec::new();
            for (m, c) in &r.terms {
                let n = index.len();
                let i = *index.entry(m.clone()).or_insert(n);
                v.insert(i, c.clone());
            }
            ech.insert(v);
        }
        ech.rank()
    }

    #[test]
    fn genus_zero_five_points() {
        // 10 divisors, 5 psi, kappa; H^2 has dimension 5
        let sp = Space::new(0, &markings(&["1", "2", "3", "4", "5"])).unwrap();
        let rels = degree_one_relations(&sp).unwrap();
        assert_eq!(16 - rank(&rels), 5);
    }

    #[test]
    fn genus_one_psi_is_a_twelfth_of_delta_irr() {
        let sp = Space::new(1, &markings(&["1"])).unwrap();
        let rels = degree_one_relations(&sp).unwrap();
        assert_eq!(rank(&rels), 2);
    }
}
