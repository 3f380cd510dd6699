//! JSON forms of graphs and expressions.
//!
//! Graph: `{"v":[g0,g1],"e":[[0,1],[1,1]],"legs":{"a":0}}`.
//! Term: `{"coeff":"p/q","graph":{..},"psi":{"a":1,"h0.1":1},"kappa":{"0":[1,1]}}`
//! where `hE.S` is side S of edge E. Expression files carry an ambient header:
//! `{"ambient":[g,["a","b"]],"terms":[..]}`. A term without a graph is read
//! from its `class` descriptor, e.g. `{"coeff":"60","class":"kappa2"}`.

use crate::error::{Error, Result};
use crate::expr::{format_q, parse_q, Decorated, Monomial, Space, TautExpr};
use crate::graph::{HalfEdge, StableGraph};
use crate::marking::Marking;
use crate::Q;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn aut(m: &Monomial) -> Q {
    Q::from_integer((m.aut() as i64).into())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub v: Vec<u32>,
    pub e: Vec<[usize; 2]>,
    pub legs: BTreeMap<String, usize>,
}

impl GraphJson {
    pub fn from_graph(g: &StableGraph) -> Self {
        GraphJson {
            v: g.genera.clone(),
            e: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            legs: g.legs.iter().map(|(m, &v)| (m.to_string(), v)).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<StableGraph> {
        let mut legs = BTreeMap::new();
        for (s, &v) in &self.legs {
            let m = Marking::parse(s).ok_or_else(|| Error::Parse(format!("bad marking {s:?}")))?;
            legs.insert(m, v);
        }
        StableGraph::new(self.v.clone(), self.e.iter().map(|e| (e[0], e[1])).collect(), legs)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExprTerm {
    pub coeff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub psi: BTreeMap<String, u8>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub kappa: BTreeMap<String, Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

fn half_edge_name(h: &HalfEdge) -> String {
    match h {
        HalfEdge::Leg(m) => m.to_string(),
        HalfEdge::Edge(e, s) => format!("h{e}.{s}"),
    }
}

fn parse_half_edge(g: &StableGraph, s: &str) -> Result<HalfEdge> {
    if let Some(rest) = s.strip_prefix('h') {
        if let Some((e, side)) = rest.split_once('.') {
            if let (Ok(e), Ok(side)) = (e.parse::<usize>(), side.parse::<u8>()) {
                if e < g.n_edges() && side < 2 {
                    return Ok(HalfEdge::Edge(e, side));
                }
                return Err(Error::Parse(format!("no half-edge {s}")));
            }
        }
    }
    let m = Marking::parse(s).ok_or_else(|| Error::Parse(format!("bad half-edge {s:?}")))?;
    if !g.legs.contains_key(&m) {
        return Err(Error::Parse(format!("no leg {s}")));
    }
    Ok(HalfEdge::Leg(m))
}

impl ExprTerm {
    pub fn from_monomial(m: &Monomial, c: &Q) -> Self {
        let d = m.decorated();
        let mut psi = BTreeMap::new();
        for h in d.graph.half_edges() {
            let p = d.psi(&h);
            if p > 0 {
                psi.insert(half_edge_name(&h), p);
            }
        }
        let kappa = d
            .kappa
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_empty())
            .map(|(v, k)| (v.to_string(), k.clone()))
            .collect();
        ExprTerm { coeff: format_q(c), graph: Some(GraphJson::from_graph(&d.graph)), psi, kappa, class: Some(m.name()) }
    }

    pub fn decorated(&self) -> Result<Decorated> {
        let g = self.graph.as_ref().ok_or_else(|| Error::Parse("a term needs a graph or a class".into()))?.to_graph()?;
        let mut d = Decorated::bare(g);
        for (h, &p) in &self.psi {
            let h = parse_half_edge(&d.graph, h)?;
            d.add_psi(&h, p);
        }
        for (v, ks) in &self.kappa {
            let v: usize = v.parse().map_err(|_| Error::Parse(format!("bad vertex {v:?}")))?;
            if v >= d.graph.n_vertices() {
                return Err(Error::Parse(format!("no vertex {v}")));
            }
            for &a in ks {
                if a == 0 || a > 2 {
                    return Err(Error::Parse(format!("kappa_{a} is out of scope")));
                }
                d.add_kappa(v, a);
            }
        }
        Ok(d)
    }

    pub fn to_expr(&self, space: &Space) -> Result<TautExpr> {
        if self.graph.is_none() {
            let class = self.class.as_deref().ok_or_else(|| Error::Parse("a term needs a graph or a class".into()))?;
            return Ok(crate::class::make_class(space, class)?.scaled(&parse_q(&self.coeff)?));
        }
        let m = self.decorated()?.canon();
        let mut e = TautExpr::zero(space);
        e.add_term(m, parse_q(&self.coeff)?);
        e.check_space()?;
        Ok(e)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExprFile {
    pub ambient: (u32, Vec<String>),
    pub terms: Vec<ExprTerm>,
    /// Coefficients are plain pushforwards rather than divided by |Aut|.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub raw: bool,
}

impl ExprFile {
    pub fn from_expr(e: &TautExpr, raw: bool) -> Self {
        let terms = e
            .terms
            .iter()
            .map(|(m, c)| if raw { ExprTerm::from_monomial(m, &(c * aut(m))) } else { ExprTerm::from_monomial(m, c) })
            .collect();
        ExprFile { ambient: (e.space.genus, e.space.markings.iter().map(|m| m.to_string()).collect()), terms, raw }
    }

    pub fn space(&self) -> Result<Space> {
        let ms: Vec<Marking> = self
            .ambient
            .1
            .iter()
            .map(|s| Marking::parse(s).ok_or_else(|| Error::Parse(format!("bad marking {s:?}"))))
            .collect::<Result<_>>()?;
        Space::new(self.ambient.0, &ms)
    }

    pub fn to_expr(&self) -> Result<TautExpr> {
        let space = self.space()?;
        let mut out = TautExpr::zero(&space);
        for t in &self.terms {
            let e = t.to_expr(&space)?;
            if self.raw && t.graph.is_some() {
                for (m, c) in e.terms {
                    let c = c / aut(&m);
                    out.add_term(m, c);
                }
            } else {
                out.add_scaled(&e, &Q::from_integer(1.into()));
            }
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::make_class;
    use crate::marking::markings;

    #[test]
    fn round_trip() {
        let sp = Space::new(2, &markings(&["a", "b"])).unwrap();
        for d in ["psi|delta_irr", "kappa1*psi_a", "psi_b*delta(1,{a})", "delta_G(1,{},0,{a,b})", "delta_F"] {
            let e = make_class(&sp, d).unwrap();
            for raw in [false, true] {
                let f = ExprFile::parse(&ExprFile::from_expr(&e, raw).to_json()).unwrap();
                assert_eq!(f.to_expr().unwrap(), e, "{d}");
            }
        }
    }

    #[test]
    fn terms_by_descriptor() {
        let f = ExprFile::parse(r#"{"ambient":[2,[]],"terms":[{"coeff":"60","class":"kappa2"},{"coeff":"-1","class":"delta_F"}]}"#).unwrap();
        let sp = f.space().unwrap();
        let mut e = make_class(&sp, "kappa2").unwrap().scaled(&Q::from_integer(60.into()));
        e.add_scaled(&make_class(&sp, "delta_F").unwrap(), &Q::from_integer((-1).into()));
        assert_eq!(f.to_expr().unwrap(), e);
    }
}
