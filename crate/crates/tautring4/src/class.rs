//! Text descriptors for named classes, e.g. `kappa1*psi_1`, `psi|delta(2,{a})`,
//! `delta_G(1,{},0,{x})`. A `*` between factors is the intersection product.

use crate::calculus::multiply;
use crate::error::{Error, Result};
use crate::expr::{Decorated, Monomial, Space, TautExpr};
use crate::graph::{Family, HalfEdge};
use crate::marking::Marking;
use crate::Q;
use std::collections::BTreeMap;

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }
    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(Error::UnknownClass(format!("expected {lit:?} at {:?}", self.rest())))
        }
    }
    fn number(&mut self) -> Result<u32> {
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(Error::UnknownClass(format!("expected a number at {:?}", self.rest())));
        }
        self.pos += digits.len();
        Ok(digits.parse().unwrap())
    }
    fn label(&mut self) -> Result<Marking> {
        let text: String = self
            .rest()
            .chars()
            .take_while(|c| !matches!(c, ',' | '}' | ')' | '*' | '^' | '|' | ' '))
            .collect();
        self.pos += text.len();
        Marking::parse(&text).ok_or_else(|| Error::UnknownClass(format!("bad marking {text:?}")))
    }
    fn set(&mut self) -> Result<Vec<Marking>> {
        if self.eat("∅") {
            return Ok(Vec::new());
        }
        self.expect("{")?;
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.push(self.label()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }
    fn power(&mut self) -> Result<usize> {
        if self.eat("^") {
            Ok(self.number()? as usize)
        } else {
            Ok(1)
        }
    }
}

fn stratum(space: &Space, f: Family) -> Result<TautExpr> {
    let g = f.build(space.genus, &space.markings)?;
    Ok(TautExpr::from_monomial(space, Monomial::stratum(&g)))
}

/// Decorates one vertex (or node side) of a separating divisor.
fn sep_decorated(space: &Space, a: u32, side: Vec<Marking>, kappa: bool) -> Result<TautExpr> {
    let g = Family::Sep { a, side }.build(space.genus, &space.markings)?;
    let mut d = Decorated::bare(g);
    if kappa {
        d.add_kappa(0, 1);
    } else {
        d.add_psi(&HalfEdge::Edge(0, 0), 1);
    }
    Ok(displayed(space, d.canon()))
}

/// The class with the displayed normalization, as a multiple of `m`.
fn displayed(space: &Space, m: Monomial) -> TautExpr {
    let s = crate::expr::display_scale(&m);
    TautExpr::from_monomial(space, m).scaled(&(Q::from_integer(1.into()) / s))
}

fn sep_args(c: &mut Cursor) -> Result<(u32, Vec<Marking>)> {
    c.expect("(")?;
    let a = c.number()?;
    c.expect(",")?;
    let side = c.set()?;
    c.expect(")")?;
    Ok((a, side))
}

fn complement(space: &Space, side: &[Marking]) -> Vec<Marking> {
    space.markings.iter().filter(|m| !side.contains(m)).cloned().collect()
}

fn atom(space: &Space, c: &mut Cursor) -> Result<TautExpr> {
    let g = space.genus;
    if c.eat("psi|delta_irr") {
        let irr = Family::Irr.build(g, &space.markings)?;
        let mut d = Decorated::bare(irr);
        d.add_psi(&HalfEdge::Edge(0, 0), 1);
        return Ok(displayed(space, d.canon()));
    }
    if c.eat("psi|delta") {
        let (a, side) = sep_args(c)?;
        return sep_decorated(space, a, side, false);
    }
    if c.eat("kappa|delta") {
        let (a, side) = sep_args(c)?;
        return sep_decorated(space, a, side, true);
    }
    if c.eat("kappa1") || c.eat("kappa_1") {
        return Ok(TautExpr::from_monomial(space, Monomial::mumford(space, vec![1], BTreeMap::new())));
    }
    if c.eat("kappa2") || c.eat("kappa_2") {
        return Ok(TautExpr::from_monomial(space, Monomial::mumford(space, vec![2], BTreeMap::new())));
    }
    if c.eat("psi_") {
        let x = c.label()?;
        if !space.markings.contains(&x) {
            return Err(Error::UnknownClass(format!("marking {x} is not in {space}")));
        }
        return Ok(TautExpr::from_monomial(space, Monomial::mumford(space, vec![], [(x, 1)].into())));
    }
    if c.eat("delta_irr") {
        return stratum(space, Family::Irr);
    }
    if c.eat("delta_F") || c.eat("F") {
        return stratum(space, Family::F);
    }
    for (prefix, which) in [("delta_E", 'E'), ("delta_H", 'H'), ("E", 'E'), ("H", 'H')] {
        if c.eat(prefix) {
            let (a, side) = sep_args(c)?;
            let f = if which == 'E' { Family::E { a, side } } else { Family::H { a, side } };
            return stratum(space, f);
        }
    }
    if c.eat("delta_G") || c.eat("G") {
        c.expect("(")?;
        let a = c.number()?;
        c.expect(",")?;
        let end = c.set()?;
        c.expect(",")?;
        let b = c.number()?;
        c.expect(",")?;
        let middle = c.set()?;
        c.expect(")")?;
        return stratum(space, Family::G { a, end, b, middle });
    }
    if c.eat("delta") {
        let (a, side) = sep_args(c)?;
        if c.eat("|psi") {
            let rest = complement(space, &side);
            return sep_decorated(space, g.checked_sub(a).ok_or_else(|| Error::UnknownClass("genus".into()))?, rest, false);
        }
        if c.eat("|kappa") {
            let rest = complement(space, &side);
            return sep_decorated(space, g.checked_sub(a).ok_or_else(|| Error::UnknownClass("genus".into()))?, rest, true);
        }
        return stratum(space, Family::Sep { a, side });
    }
    if c.eat("1") {
        return Ok(TautExpr::one(space));
    }
    Err(Error::UnknownClass(format!("cannot read {:?}", c.rest())))
}

/// Builds the class named by `descriptor` on `space`.
pub fn make_class(space: &Space, descriptor: &str) -> Result<TautExpr> {
    let text: String = descriptor.split_whitespace().collect::<Vec<_>>().join("");
    let mut c = Cursor { s: &text, pos: 0 };
    let mut acc = TautExpr::one(space);
    loop {
        let a = atom(space, &mut c)?;
        let k = c.power()?;
        for _ in 0..k {
            acc = multiply(&acc, &a)?;
        }
        if c.rest().is_empty() {
            break;
        }
        c.expect("*")?;
    }
    Ok(acc)
}

/// Like `make_class` but multiplied by a rational coefficient.
pub fn term(space: &Space, coeff: &Q, descriptor: &str) -> Result<TautExpr> {
    Ok(make_class(space, descriptor)?.scaled(coeff))
}

