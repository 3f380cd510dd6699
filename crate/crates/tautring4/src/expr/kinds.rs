use super::Monomial;
use crate::graph::{Family, HalfEdge};
use crate::marking::Marking;
use crate::Q;
use num_traits::One;
use std::collections::BTreeMap;

/// The decorated vertex of a separating divisor: its genus and its markings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SepSide {
    pub a: u32,
    pub side: Vec<Marking>,
}

/// Shapes of monomials of degree at most two, in the names used for output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Mumford { kappa: Vec<u8>, psi: BTreeMap<Marking, u8> },
    /// Undecorated stratum of codimension 0, 1 or 2.
    Stratum(Family),
    KappaIrr,
    /// psi on one half of the loop; `psi|delta_irr` is twice this monomial.
    PsiIrr,
    PsiLegIrr(Marking),
    KappaSep(SepSide),
    PsiSep(SepSide),
    PsiLegSep(Marking, SepSide),
    Other,
}

pub fn classify(m: &Monomial) -> Kind {
    let d = m.decorated();
    let g = &d.graph;
    if m.codim() == 0 {
        return Kind::Mumford { kappa: d.kappa[0].clone(), psi: d.leg_psi.clone() };
    }
    let Some(family) = Family::classify(g) else { return Kind::Other };
    if m.deco_degree() == 0 {
        return Kind::Stratum(family);
    }
    if m.codim() != 1 || m.deco_degree() != 1 {
        return Kind::Other;
    }
    // exactly one degree-one decoration on a divisor
    let v = (0..g.n_vertices()).find(|&v| d.local_degree(v) > 0).unwrap();
    let side = SepSide { a: g.genera[v], side: g.legs_at(v) };
    let kappa = !d.kappa[v].is_empty();
    let leg = d.leg_psi.keys().next().cloned();
    match family {
        Family::Irr => match (kappa, leg) {
            (true, _) => Kind::KappaIrr,
            (false, Some(x)) => Kind::PsiLegIrr(x),
            (false, None) => Kind::PsiIrr,
        },
        Family::Sep { .. } => match (kappa, leg) {
            (true, _) => Kind::KappaSep(side),
            (false, Some(x)) => Kind::PsiLegSep(x, side),
            (false, None) => Kind::PsiSep(side),
        },
        _ => Kind::Other,
    }
}

fn set(ms: &[Marking]) -> String {
    let v: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn psi_name(x: &Marking) -> String {
    format!("psi_{}", x)
}

/// Factor by which a displayed coefficient differs from the stored one:
/// displayed = stored * scale. Displayed classes divide by the automorphisms
/// of the decorated graph, stored ones by those of the bare graph.
pub fn display_scale(m: &Monomial) -> Q {
    if m.is_undecorated() {
        return Q::one();
    }
    Q::new(m.decorated_aut().into(), m.aut().into())
}

pub fn name(m: &Monomial) -> String {
    match classify(m) {
        Kind::Mumford { kappa, psi } => {
            let mut parts: Vec<String> = Vec::new();
            let k1 = kappa.iter().filter(|&&a| a == 1).count();
            match k1 {
                0 => {}
                1 => parts.push("kappa1".into()),
                n => parts.push(format!("kappa1^{n}")),
            }
            for a in kappa.iter().filter(|&&a| a > 1) {
                parts.push(format!("kappa{a}"));
            }
            for (x, e) in &psi {
                if *e == 1 {
                    parts.push(psi_name(x));
                } else {
                    parts.push(format!("{}^{}", psi_name(x), e));
                }
            }
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join("*")
            }
        }
        Kind::Stratum(f) => match f {
            Family::Smooth => "1".into(),
            Family::Irr => "delta_irr".into(),
            Family::Sep { a, side } => format!("delta({},{})", a, set(&side)),
            Family::F => "delta_F".into(),
            Family::E { a, side } => format!("delta_E({},{})", a, set(&side)),
            Family::H { a, side } => format!("delta_H({},{})", a, set(&side)),
            Family::G { a, end, b, middle } => format!("delta_G({},{},{},{})", a, set(&end), b, set(&middle)),
        },
        Kind::KappaIrr => "kappa1*delta_irr".into(),
        Kind::PsiIrr => "psi|delta_irr".into(),
        Kind::PsiLegIrr(x) => format!("{}*delta_irr", psi_name(&x)),
        Kind::KappaSep(s) => format!("kappa|delta({},{})", s.a, set(&s.side)),
        Kind::PsiSep(s) => format!("psi|delta({},{})", s.a, set(&s.side)),
        Kind::PsiLegSep(x, s) => format!("{}*delta({},{})", psi_name(&x), s.a, set(&s.side)),
        Kind::Other => raw_name(m),
    }
}

fn raw_name(m: &Monomial) -> String {
    let d = m.decorated();
    let verts: Vec<String> = (0..d.graph.n_vertices())
        .map(|v| {
            let ks: Vec<String> = d.kappa[v].iter().map(|a| format!("k{a}")).collect();
            if ks.is_empty() {
                format!("{}", d.graph.genera[v])
            } else {
                format!("{}:{}", d.graph.genera[v], ks.join(""))
            }
        })
        .collect();
    let edges: Vec<String> = d
        .graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let p0 = d.psi(&HalfEdge::Edge(e, 0));
            let p1 = d.psi(&HalfEdge::Edge(e, 1));
            if p0 + p1 == 0 {
                format!("{a}-{b}")
            } else {
                format!("{a}^{p0}-{b}^{p1}")
            }
        })
        .collect();
    let legs: Vec<String> = d
        .graph
        .legs
        .iter()
        .map(|(x, v)| {
            let p = d.leg_psi.get(x).copied().unwrap_or(0);
            if p == 0 {
                format!("{x}@{v}")
            } else {
                format!("{x}^{p}@{v}")
            }
        })
        .collect();
    format!("graph[{}; {}; {}]", verts.join(" "), edges.join(" "), legs.join(" "))
}
