//! Loading native relations from the versioned data file.

use crate::class::make_class;
use crate::error::{Error, Result};
use crate::expr::{parse_q, Space, TautExpr};
use crate::io::ExprTerm;
use crate::marking::Marking;
use crate::Q;
use serde::Deserialize;
use std::path::Path;

const BUILTIN: &str = include_str!("../../data/relations.json");
pub const CATALOG_ENV: &str = "TAUTRING4_CATALOG";
const SUPPORTED_VERSION: u32 = 1;

#[derive(Deserialize)]
struct CatalogFile {
    version: u32,
    relations: Vec<RawRelation>,
}

#[derive(Deserialize)]
struct RawRelation {
    id: String,
    ambient: (u32, Vec<String>),
    #[serde(default)]
    terms: Vec<(String, String)>,
    #[serde(default)]
    expr: Vec<ExprTerm>,
    #[serde(default)]
    corrections: Vec<Correction>,
}

/// Edits applied to the listed terms, in order, before the relation is used.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Correction {
    /// Change the sign of every term except the listed descriptors.
    Negate { except: Vec<String>, reason: String },
    /// Replace the coefficient of one descriptor.
    Set { descriptor: String, coeff: String, reason: String },
    /// Replace one descriptor by another, keeping the coefficient.
    Rename { from: String, to: String, reason: String },
    /// Append a term missing from the list.
    Add { descriptor: String, coeff: String, reason: String },
}

impl Correction {
    pub fn reason(&self) -> &str {
        match self {
            Correction::Negate { reason, .. }
            | Correction::Set { reason, .. }
            | Correction::Rename { reason, .. }
            | Correction::Add { reason, .. } => reason,
        }
    }

    fn apply(&self, terms: &mut Vec<(String, String)>) -> Result<()> {
        if let Correction::Add { descriptor, coeff, .. } = self {
            if terms.iter().any(|(_, d)| d == descriptor) {
                return Err(Error::Catalog(format!("{descriptor} is already listed")));
            }
            terms.push((coeff.clone(), descriptor.clone()));
            return Ok(());
        }
        let mut hit = false;
        for (c, d) in terms.iter_mut() {
            match self {
                Correction::Negate { except, .. } => {
                    if !except.contains(d) {
                        *c = crate::expr::format_q(&-parse_q(c)?);
                    }
                    hit = true;
                }
                Correction::Set { descriptor, coeff, .. } if d == descriptor => {
                    *c = coeff.clone();
                    hit = true;
                }
                Correction::Rename { from, to, .. } if d == from => {
                    *d = to.clone();
                    hit = true;
                }
                _ => {}
            }
        }
        if hit {
            Ok(())
        } else {
            Err(Error::Catalog(format!("correction {self:?} matches no term")))
        }
    }
}

/// A relation from the data file, on its own ambient space.
#[derive(Clone, Debug)]
pub struct NativeRelation {
    pub id: String,
    /// The relation after corrections.
    pub expr: TautExpr,
    /// The relation with the listed coefficients, when it can be formed.
    pub printed: Option<TautExpr>,
    pub corrections: Vec<Correction>,
}

/// Labels that a descriptor mentions explicitly: set members and psi legs.
fn mentioned(descriptor: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = descriptor;
    while let Some(open) = rest.find('{') {
        let close = rest[open..].find('}').map(|c| open + c).unwrap_or(rest.len());
        out.extend(rest[open + 1..close].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
        rest = &rest[(close + 1).min(rest.len())..];
    }
    for part in descriptor.split("psi_").skip(1) {
        let label: String = part.chars().take_while(|c| !matches!(c, '*' | '^' | '|' | ' ')).collect();
        out.push(label);
    }
    out
}

/// Expands each `{*}` into the average over markings not named elsewhere.
fn expand_star(space: &Space, coeff: &Q, descriptor: &str) -> Result<TautExpr> {
    if !descriptor.contains("{*}") {
        return Ok(make_class(space, descriptor)?.scaled(coeff));
    }
    let used = mentioned(descriptor);
    let free: Vec<&Marking> = space.markings.iter().filter(|m| !used.contains(&m.to_string())).collect();
    if free.is_empty() {
        return Err(Error::Catalog(format!("no marking available for * in {descriptor}")));
    }
    let share = coeff / Q::from_integer((free.len() as i64).into());
    let mut out = TautExpr::zero(space);
    for m in free {
        let d = descriptor.replacen("{*}", &format!("{{{m}}}"), 1);
        out.add_scaled(&expand_star(space, &share, &d)?, &Q::from_integer(1.into()));
    }
    Ok(out)
}

fn parse_catalog(text: &str) -> Result<Vec<NativeRelation>> {
    let file: CatalogFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.version != SUPPORTED_VERSION {
        return Err(Error::Catalog(format!("unsupported catalog version {}", file.version)));
    }
    let mut out = Vec::new();
    for raw in file.relations {
        let ms: Vec<Marking> = raw
            .ambient
            .1
            .iter()
            .map(|s| Marking::parse(s).ok_or_else(|| Error::Parse(format!("bad marking {s:?}"))))
            .collect::<Result<_>>()?;
        let space = Space::new(raw.ambient.0, &ms)?;
        let build = |terms: &[(String, String)]| -> Result<TautExpr> {
            let mut expr = TautExpr::zero(&space);
            for (c, d) in terms {
                let e = expand_star(&space, &parse_q(c)?, d).map_err(|e| Error::Catalog(format!("{}: {e}", raw.id)))?;
                expr.add_scaled(&e, &Q::from_integer(1.into()));
            }
            for t in &raw.expr {
                expr.add_scaled(&t.to_expr(&space)?, &Q::from_integer(1.into()));
            }
            Ok(expr)
        };
        let printed = build(&raw.terms).ok();
        let mut terms = raw.terms.clone();
        for c in &raw.corrections {
            c.apply(&mut terms).map_err(|e| Error::Catalog(format!("{}: {e}", raw.id)))?;
        }
        let expr = build(&terms)?;
        if expr.is_zero() {
            return Err(Error::Catalog(format!("{}: relation is formally zero", raw.id)));
        }
        if expr.degree()? != Some(2) {
            return Err(Error::Catalog(format!("{}: relation is not of degree two", raw.id)));
        }
        out.push(NativeRelation { id: raw.id, expr, printed, corrections: raw.corrections });
    }
    Ok(out)
}

/// The native relations: the file named by `TAUTRING4_CATALOG` if set,
/// otherwise the built-in table.
pub fn load_natives() -> Result<Vec<NativeRelation>> {
    match std::env::var_os(CATALOG_ENV) {
        Some(path) => load_natives_from(Path::new(&path)),
        None => parse_catalog(BUILTIN),
    }
}

pub fn load_natives_from(path: &Path) -> Result<Vec<NativeRelation>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))?;
    parse_catalog(&text)
}

pub fn builtin_natives() -> Result<Vec<NativeRelation>> {
    parse_catalog(BUILTIN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_loads() {
        let rels = builtin_natives().unwrap();
        assert_eq!(rels.len(), 19);
        assert!(rels.iter().all(|r| !r.expr.is_zero()));
    }

    #[test]
    fn star_is_averaged() {
        let sp = Space::new(2, &crate::marking::markings(&["1", "2", "3"])).unwrap();
        let e = expand_star(&sp, &Q::from_integer(3.into()), "G(2,{},0,{*})").unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.terms.values().all(|c| *c == Q::from_integer(1.into())));
    }
}
