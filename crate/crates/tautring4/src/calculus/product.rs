use super::boundary::boundary_map;
use crate::error::{Error, Result};
use crate::expr::{Monomial, Space, TautExpr, TensorExpr};
use crate::marking::Marking;
use crate::Q;
use num_traits::One;
use std::collections::BTreeMap;

/// [Gamma; p] times a Mumford monomial pulled back to Gamma: psi_i lands on
/// leg i and kappa_a becomes the sum of kappa_a over the vertices.
pub fn mumford_times(m: &Monomial, kappa: &[u8], psi: &BTreeMap<Marking, u8>) -> TautExpr {
    let d = m.decorated();
    let markings = m.markings();
    let space = Space { genus: m.genus(), markings };
    let mut base = d.clone();
    for (x, &p) in psi {
        base.add_psi(&crate::graph::HalfEdge::Leg(x.clone()), p);
    }
    let mut decs = vec![base];
    for &a in kappa {
        decs = decs
            .into_iter()
            .flat_map(|dec| {
                (0..dec.graph.n_vertices())
                    .map(|v| {
                        let mut d2 = dec.clone();
                        d2.add_kappa(v, a);
                        d2
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out = TautExpr::zero(&space);
    for dec in decs {
        out.add_term(dec.canon(), Q::one());
    }
    out
}

fn mul_monomials(space: &Space, x: &Monomial, y: &Monomial) -> Result<TautExpr> {
    if x.degree() + y.degree() > 2 {
        return Err(Error::DegreeMismatch(format!(
            "product of degrees {} and {} exceeds two",
            x.degree(),
            y.degree()
        )));
    }
    if x.codim() == 0 {
        let d = x.decorated();
        return Ok(mumford_times(y, &d.kappa[0], &d.leg_psi));
    }
    if y.codim() == 0 {
        return mul_monomials(space, y, x);
    }
    if x.codim() != 1 {
        return mul_monomials(space, y, x);
    }
    let bm = boundary_map(space, &x.graph())?;
    let pulled = bm.pullback_monomial(y)?;
    let decos = bm.factor_decorations(&x.decorated());
    let mut decorated = TensorExpr::zero(&bm.factors);
    for (ms, c) in &pulled.terms {
        let mut partial: Vec<(Vec<Monomial>, Q)> = vec![(Vec::new(), c.clone())];
        for (i, m) in ms.iter().enumerate() {
            let (k, p) = &decos[i];
            let prod = mumford_times(m, k, p);
            partial = partial
                .into_iter()
                .flat_map(|(pre, pc)| {
                    prod.terms
                        .iter()
                        .map(|(m2, c2)| {
                            let mut v = pre.clone();
                            v.push(m2.clone());
                            (v, &pc * c2)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        for (v, c) in partial {
            decorated.add_term(v, c);
        }
    }
    let pushed = bm.pushforward(&decorated)?;
    Ok(pushed.scaled(&Q::new(1.into(), (bm.aut as i64).into())))
}

/// Product of two expressions on the same space, total degree at most two.
pub fn multiply(x: &TautExpr, y: &TautExpr) -> Result<TautExpr> {
    if x.space != y.space {
        return Err(Error::AmbientMismatch(format!("{} vs {}", x.space, y.space)));
    }
    let mut out = TautExpr::zero(&x.space);
    for (mx, cx) in &x.terms {
        for (my, cy) in &y.terms {
            let p = mul_monomials(&x.space, mx, my)?;
            out.add_scaled(&p, &(cx * cy));
        }
    }
    Ok(out)
}

pub fn power(x: &TautExpr, k: usize) -> Result<TautExpr> {
    let mut acc = TautExpr::one(&x.space);
    for _ in 0..k {
        acc = multiply(&acc, x)?;
    }
    Ok(acc)
}
