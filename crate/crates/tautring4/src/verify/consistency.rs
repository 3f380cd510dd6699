//! Pulling relations back along boundary and forgetful maps and checking
//! that the images vanish modulo the relations on the target.

use crate::calculus::{boundary_map, forget_pullback};
use crate::error::Result;
use crate::expr::{Monomial, Space, TautExpr, TensorExpr};
use crate::graph::enumerate;
use crate::marking::Marking;
use crate::relations::{catalog, tensor_normal_form};
use std::fmt;

#[derive(Clone, Debug)]
pub struct MapCheck {
    pub map: String,
    /// Terms of the image that survive reduction; empty when consistent.
    pub residual: Vec<String>,
}

impl MapCheck {
    pub fn ok(&self) -> bool {
        self.residual.is_empty()
    }
}

impl fmt::Display for MapCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "{}: ok", self.map)
        } else {
            write!(f, "{}: {} residual terms: {}", self.map, self.residual.len(), self.residual.join(" + "))
        }
    }
}

fn single_factor(t: &TensorExpr, keep: usize) -> TautExpr {
    let mut e = TautExpr::zero(&t.factors[keep]);
    for (ms, c) in &t.terms {
        e.add_term(ms[keep].clone(), c.clone());
    }
    e
}

fn describe(e: &TautExpr) -> Vec<String> {
    e.terms.iter().map(|(m, c)| format!("{} {}", crate::expr::format_q(c), m.name())).collect()
}

fn tensor_residual(t: &TensorExpr) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for pattern in t.degree_patterns() {
        let part = t.component(&pattern);
        let left = match pattern.as_slice() {
            [_] => describe(&catalog(&t.factors[0])?.normal_form(&single_factor(&part, 0))?),
            [2, 0] => describe(&catalog(&t.factors[0])?.normal_form(&single_factor(&part, 0))?),
            [0, 2] => describe(&catalog(&t.factors[1])?.normal_form(&single_factor(&part, 1))?),
            _ => tensor_normal_form(&part)?
                .terms
                .iter()
                .map(|(ms, c)| format!("{} {} (x) {}", crate::expr::format_q(c), ms[0].name(), ms[1].name()))
                .collect(),
        };
        out.extend(left);
    }
    Ok(out)
}

/// A marking label not used on the space.
pub fn fresh_point(space: &Space) -> Marking {
    (1..)
        .map(|i| Marking::point(if i == 1 { "x".to_string() } else { format!("x{i}") }))
        .find(|m| !space.markings.contains(m))
        .unwrap()
}

/// Pullbacks along every divisor whose vertices all have genus at least
/// `min_genus`.
pub fn boundary_checks(rel: &TautExpr, min_genus: u32) -> Result<Vec<MapCheck>> {
    let mut out = Vec::new();
    for ng in enumerate(rel.space.genus, &rel.space.markings, 1)? {
        if ng.graph.genera.iter().any(|&h| h < min_genus) {
            continue;
        }
        let map = boundary_map(&rel.space, &ng.graph)?;
        let t = map.pullback(rel)?;
        out.push(MapCheck { map: format!("xi_{}", Monomial::stratum(&ng.graph).name()), residual: tensor_residual(&t)? });
    }
    Ok(out)
}

pub fn forget_check(rel: &TautExpr) -> Result<MapCheck> {
    let x = fresh_point(&rel.space);
    let image = forget_pullback(rel, &x)?;
    let nf = catalog(&image.space)?.normal_form(&image)?;
    Ok(MapCheck { map: format!("pi_{x}"), residual: describe(&nf) })
}

/// All boundary maps into factors of genus at least one, and one forgetful map.
pub fn relation_checks(rel: &TautExpr) -> Result<Vec<MapCheck>> {
    let mut out = boundary_checks(rel, 1)?;
    out.push(forget_check(rel)?);
    Ok(out)
}
