//! The new degree-two relation on M(3,{a,b}), recovered from boundary
//! pullbacks and compared with its published coefficients.

use super::derive::{pullback_kernel, quotient_basis};
use crate::class::make_class;
use crate::error::{Error, Result};
use crate::expr::{display_scale, format_q, parse_q, Monomial, Space, TautExpr};
use crate::graph::Family;
use crate::marking::Marking;
use crate::relations::{natives, Catalog};
use crate::Q;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt;

pub const NATIVE_ID: &str = "g3n2";

/// Coefficients with k = 1, in the order they are tabulated.
pub const TABLE: &[(&str, &str)] = &[
    ("F", "-1/630"),
    ("H(2,{})", "1/7"),
    ("G(1,{a,b},1,{})", "16/35"),
    ("psi|delta_irr", "-1/42"),
    ("E(1,{a,b})", "-9/35"),
    ("H(1,{})", "4/105"),
    ("G(1,{},1,{a,b})", "-8/35"),
    ("psi|delta(3,{})", "5"),
    ("E(0,{a,b})", "13/21"),
    ("H(1,{a,b})", "-2/105"),
    ("G(1,{},2,{})", "5/7"),
    ("psi|delta(2,{})", "-40/21"),
    ("H(0,{})", "4/63"),
    ("G(2,{},0,{a,b})", "40/21"),
    ("psi|delta(2,{a,b})", "-16/21"),
    ("H(0,{a,b})", "10/63"),
    ("G(2,{},1,{})", "-1"),
    ("kappa|delta(3,{})", "-1"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficient {
    pub class: String,
    pub derived: Q,
    pub printed: Q,
}

impl Coefficient {
    pub fn ok(&self) -> bool {
        self.derived == self.printed
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.ok() { "ok" } else { "DIFFERS" };
        write!(f, "{:<24} derived {:>9}  printed {:>9}  {mark}", self.class, format_q(&self.derived), format_q(&self.printed))
    }
}

pub struct M32Report {
    pub unknowns: usize,
    pub maps: Vec<String>,
    pub kernel_dim: usize,
    /// The solution with k = 1, in coordinates modulo the older relations.
    pub relation: Option<TautExpr>,
    pub table: Vec<Coefficient>,
    /// Every coordinate where the derived relation or the display is nonzero.
    pub display: Vec<Coefficient>,
}

impl M32Report {
    pub fn table_ok(&self) -> bool {
        self.table.iter().all(Coefficient::ok)
    }

    pub fn display_ok(&self) -> bool {
        self.display.iter().all(Coefficient::ok)
    }

    pub fn ok(&self) -> bool {
        self.kernel_dim == 1 && self.table_ok() && self.display_ok()
    }
}

fn space() -> Space {
    Space::new(3, &[Marking::point("a"), Marking::point("b")]).expect("M(3,2) is stable")
}

/// The divisors whose pullbacks cut out the relation: the rational tail
/// carrying both markings, and the genus-two/genus-one splittings.
pub fn divisors() -> Vec<Family> {
    let a = Marking::point("a");
    let b = Marking::point("b");
    vec![
        Family::Sep { a: 3, side: vec![] },
        Family::Sep { a: 2, side: vec![] },
        Family::Sep { a: 2, side: vec![a] },
        Family::Sep { a: 2, side: vec![b] },
    ]
}

fn single(space: &Space, descriptor: &str) -> Result<(Monomial, Q)> {
    let e = make_class(space, descriptor)?;
    let mut it = e.terms.into_iter();
    match (it.next(), it.next()) {
        (Some(t), None) => Ok(t),
        _ => Err(Error::UnknownClass(format!("{descriptor} is not a single stratum class"))),
    }
}

pub fn rederive_m32() -> Result<M32Report> {
    let space = space();
    let known = Catalog::build_filtered(&space, None, &|id| id != NATIVE_ID)?;
    let unknowns = quotient_basis(&known);
    let fams = divisors();
    let graphs = fams.iter().map(|f| f.build(3, &space.markings)).collect::<Result<Vec<_>>>()?;
    let kernel = pullback_kernel(&space, &unknowns, &graphs)?;
    let maps = fams.iter().map(|f| f.to_string()).collect();

    let (lead, lead_value) = single(&space, "kappa|delta(3,{})")?;
    let lead_value = -lead_value;
    let relation = match kernel.as_slice() {
        [k] => {
            let c = k.terms.get(&lead).cloned().unwrap_or_else(Q::zero);
            if c.is_zero() {
                None
            } else {
                Some(known.normal_form(&k.scaled(&(lead_value / c)))?)
            }
        }
        _ => None,
    };

    let mut table = Vec::new();
    let mut display = Vec::new();
    if let Some(rel) = &relation {
        let get = |m: &Monomial| rel.terms.get(m).cloned().unwrap_or_else(Q::zero);
        for (d, v) in TABLE {
            let (m, scale) = single(&space, d)?;
            table.push(Coefficient { class: m.name(), derived: get(&m) / &scale, printed: parse_q(v)? });
        }
        let native = natives()?
            .iter()
            .find(|n| n.id == NATIVE_ID)
            .ok_or_else(|| Error::Catalog(format!("no relation {NATIVE_ID} in the data file")))?;
        let printed = native.printed.as_ref().unwrap_or(&native.expr);
        let printed = known.normal_form(printed)?;
        let support: BTreeSet<&Monomial> = rel.terms.keys().chain(printed.terms.keys()).collect();
        for m in support {
            let s = display_scale(m);
            let p = printed.terms.get(m).cloned().unwrap_or_else(Q::zero);
            display.push(Coefficient { class: m.name(), derived: get(m) * &s, printed: p * &s });
        }
    }
    Ok(M32Report { unknowns: unknowns.len(), maps, kernel_dim: kernel.len(), relation, table, display })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_classes_are_single_strata() {
        let sp = space();
        for (d, _) in TABLE {
            single(&sp, d).unwrap();
        }
    }
}
