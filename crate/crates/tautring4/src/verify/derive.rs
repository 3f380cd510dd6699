//! Relations found as the common kernel of boundary pullbacks.

use crate::calculus::boundary_map;
use crate::error::Result;
use crate::expr::{Monomial, Space, TautExpr, TensorExpr};
use crate::graph::StableGraph;
use crate::linalg::RationalMatrix;
use crate::relations::{catalog, tensor_normal_form, Catalog};
use crate::Q;
use std::collections::BTreeMap;

/// Coordinates of a pulled-back class modulo the relations on the target,
/// keyed by factor monomials.
pub fn image_coordinates(t: &TensorExpr) -> Result<BTreeMap<Vec<Monomial>, Q>> {
    let mut out = BTreeMap::new();
    for pattern in t.degree_patterns() {
        let part = t.component(&pattern);
        let n = t.factors.len();
        let full = pattern.iter().position(|&d| d == 2);
        match (n, full) {
            (_, Some(i)) => {
                let mut e = TautExpr::zero(&t.factors[i]);
                let mut rest = None;
                for (ms, c) in &part.terms {
                    e.add_term(ms[i].clone(), c.clone());
                    rest.get_or_insert_with(|| ms.clone());
                }
                let Some(rest) = rest else { continue };
                for (m, c) in catalog(&t.factors[i])?.normal_form(&e)?.terms {
                    let mut key = rest.clone();
                    key[i] = m;
                    out.insert(key, c);
                }
            }
            _ => {
                for (ms, c) in tensor_normal_form(&part)?.terms {
                    out.insert(ms, c);
                }
            }
        }
    }
    Ok(out)
}

/// The classes in `unknowns` whose combinations pull back to zero along
/// every divisor in `divisors`.
pub fn pullback_kernel(space: &Space, unknowns: &[Monomial], divisors: &[StableGraph]) -> Result<Vec<TautExpr>> {
    let mut keys: BTreeMap<(usize, Vec<Monomial>), usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (d, div) in divisors.iter().enumerate() {
        let map = boundary_map(space, div)?;
        for (j, m) in unknowns.iter().enumerate() {
            let t = map.pullback(&TautExpr::from_monomial(space, m.clone()))?;
            for (k, c) in image_coordinates(&t)? {
                let n = keys.len();
                let row = *keys.entry((d, k)).or_insert(n);
                entries.push((row, j, c));
            }
        }
    }
    let mat = RationalMatrix::from_triplets(keys.len(), unknowns.len(), &entries);
    Ok(mat
        .kernel()
        .into_iter()
        .map(|v| {
            let mut e = TautExpr::zero(space);
            for (m, c) in unknowns.iter().zip(v) {
                e.add_term(m.clone(), c);
            }
            e
        })
        .collect())
}

/// Representatives of the quotient of degree-two classes by `known`.
pub fn quotient_basis(known: &Catalog) -> Vec<Monomial> {
    let mut out = known.unexplained();
    out.extend(known.reduced_basis());
    out
}

/// A native relation set against the kernel of all boundary pullbacks on
/// the quotient by every relation not native to its genus.
pub struct KernelComparison {
    pub id: String,
    pub kernel_dim: usize,
    /// Coordinates used to pick the kernel element.
    pub fit_on: Vec<Monomial>,
    /// The kernel element agreeing with the relation on `fit_on`.
    pub derived: Option<TautExpr>,
    /// The relation under test, in the same coordinates.
    pub given: TautExpr,
}

impl KernelComparison {
    /// Coordinates where the two differ, with display-scaled values
    /// (given, derived).
    pub fn differences(&self) -> Vec<(Monomial, Q, Q)> {
        let Some(d) = &self.derived else { return Vec::new() };
        let zero = Q::from_integer(0.into());
        let mut keys: Vec<&Monomial> = d.terms.keys().chain(self.given.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter_map(|m| {
                let g = self.given.terms.get(m).unwrap_or(&zero);
                let x = d.terms.get(m).unwrap_or(&zero);
                (g != x).then(|| {
                    let s = crate::expr::display_scale(m);
                    (m.clone(), g * &s, x * &s)
                })
            })
            .collect()
    }
}

/// Fits `rel` by a kernel element, preferring coordinates with kappa
/// decorations and then low codimension.
pub fn compare_with_kernel(id: &str, rel: &TautExpr) -> Result<KernelComparison> {
    let space = rel.space.clone();
    let g = space.genus;
    let prefix = format!("g{g}");
    let known = Catalog::build_filtered(&space, None, &|id| !id.starts_with(&prefix))?;
    let unknowns = quotient_basis(&known);
    let divisors: Vec<StableGraph> = crate::graph::enumerate(g, &space.markings, 1)?.into_iter().map(|n| n.graph).collect();
    let kernel = pullback_kernel(&space, &unknowns, &divisors)?
        .iter()
        .map(|k| known.normal_form(k))
        .collect::<Result<Vec<_>>>()?;
    let given = known.normal_form(rel)?;
    let get = |e: &TautExpr, m: &Monomial| e.terms.get(m).cloned().unwrap_or_else(|| Q::from_integer(0.into()));

    let mut order = unknowns.clone();
    order.sort_by_key(|m| (m.0.verts.iter().all(|v| v.1.is_empty()), m.codim()));
    let mut fit_on = Vec::new();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for m in order {
        if rows.len() == kernel.len() {
            break;
        }
        let r: Vec<Q> = kernel.iter().map(|k| get(k, &m)).collect();
        let mut trial = rows.clone();
        trial.push(r.clone());
        if RationalMatrix::from_dense(&trial).rank() > rows.len() {
            rows.push(r);
            fit_on.push(m);
        }
    }
    let b: Vec<Q> = fit_on.iter().map(|m| get(&given, m)).collect();
    let derived = RationalMatrix::from_dense(&rows).solve(&b).map(|x| {
        let mut d = TautExpr::zero(&space);
        for (k, c) in kernel.iter().zip(&x) {
            d.add_scaled(k, c);
        }
        d
    });
    Ok(KernelComparison { id: id.to_string(), kernel_dim: kernel.len(), fit_on, derived, given })
}
