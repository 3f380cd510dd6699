use super::{canonical_key, CanonKey, StableGraph};
use crate::error::{Error, Result};
use crate::marking::Marking;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

/// Named families of connected stable graphs of codimension at most two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Smooth,
    Irr,
    /// Separating edge; `side` is carried by the genus `a` vertex.
    Sep { a: u32, side: Vec<Marking> },
    /// One vertex of genus g-2 with two loops.
    F,
    /// Two vertices of genus a and g-1-a joined by two edges.
    E { a: u32, side: Vec<Marking> },
    /// A loop vertex (a, side) joined by one edge to a vertex of genus g-1-a.
    H { a: u32, side: Vec<Marking> },
    /// A chain: end (a, end), middle (b, middle), far end (g-a-b, rest).
    G { a: u32, end: Vec<Marking>, b: u32, middle: Vec<Marking> },
}

#[derive(Clone, Debug)]
pub struct NamedGraph {
    pub family: Family,
    pub graph: StableGraph,
    pub key: CanonKey,
}

fn complement(all: &[Marking], part: &[Marking]) -> Vec<Marking> {
    all.iter().filter(|m| !part.contains(m)).cloned().collect()
}

fn fmt_set(s: &[Marking]) -> String {
    let items: Vec<String> = s.iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Smooth => write!(f, "smooth"),
            Family::Irr => write!(f, "irr"),
            Family::Sep { a, side } => write!(f, "sep({},{})", a, fmt_set(side)),
            Family::F => write!(f, "F"),
            Family::E { a, side } => write!(f, "E({},{})", a, fmt_set(side)),
            Family::H { a, side } => write!(f, "H({},{})", a, fmt_set(side)),
            Family::G { a, end, b, middle } => write!(f, "G({},{},{},{})", a, fmt_set(end), b, fmt_set(middle)),
        }
    }
}

fn legs_on(assign: &[(&[Marking], usize)]) -> BTreeMap<Marking, usize> {
    let mut legs = BTreeMap::new();
    for (ms, v) in assign {
        for m in ms.iter() {
            legs.insert(m.clone(), *v);
        }
    }
    legs
}

fn sub(g: u32, x: u32) -> Result<u32> {
    g.checked_sub(x).ok_or_else(|| Error::Unstable(format!("genus {g} is too small")))
}

impl Family {
    pub fn codim(&self) -> usize {
        match self {
            Family::Smooth => 0,
            Family::Irr | Family::Sep { .. } => 1,
            _ => 2,
        }
    }

    /// Builds the graph on M_{g, markings}.
    pub fn build(&self, g: u32, markings: &[Marking]) -> Result<StableGraph> {
        for s in self.mentioned() {
            if !markings.contains(s) {
                return Err(Error::UnknownClass(format!("marking {s} is not in the ambient space")));
            }
        }
        match self {
            Family::Smooth => StableGraph::new(vec![g], vec![], legs_on(&[(markings, 0)])),
            Family::Irr => StableGraph::new(vec![sub(g, 1)?], vec![(0, 0)], legs_on(&[(markings, 0)])),
            Family::Sep { a, side } => {
                let rest = complement(markings, side);
                StableGraph::new(vec![*a, sub(g, *a)?], vec![(0, 1)], legs_on(&[(side, 0), (&rest, 1)]))
            }
            Family::F => StableGraph::new(vec![sub(g, 2)?], vec![(0, 0), (0, 0)], legs_on(&[(markings, 0)])),
            Family::E { a, side } => {
                let rest = complement(markings, side);
                let other = sub(sub(g, 1)?, *a)?;
                StableGraph::new(vec![*a, other], vec![(0, 1), (0, 1)], legs_on(&[(side, 0), (&rest, 1)]))
            }
            Family::H { a, side } => {
                let rest = complement(markings, side);
                let other = sub(sub(g, 1)?, *a)?;
                StableGraph::new(vec![*a, other], vec![(0, 0), (0, 1)], legs_on(&[(side, 0), (&rest, 1)]))
            }
            Family::G { a, end, b, middle } => {
                if end.iter().any(|m| middle.contains(m)) {
                    return Err(Error::UnknownClass("chain parts share a marking".into()));
                }
                let mut used = end.clone();
                used.extend(middle.iter().cloned());
                let rest = complement(markings, &used);
                let far = sub(sub(g, *a)?, *b)?;
                StableGraph::new(
                    vec![*a, *b, far],
                    vec![(0, 1), (1, 2)],
                    legs_on(&[(end, 0), (middle, 1), (&rest, 2)]),
                )
            }
        }
    }

    fn mentioned(&self) -> Vec<&Marking> {
        match self {
            Family::Smooth | Family::Irr | Family::F => vec![],
            Family::Sep { side, .. } | Family::E { side, .. } | Family::H { side, .. } => side.iter().collect(),
            Family::G { end, middle, .. } => end.iter().chain(middle.iter()).collect(),
        }
    }

    /// Recognises the family of a connected graph of codimension at most two
    /// and returns it in preferred orientation.
    pub fn classify(graph: &StableGraph) -> Option<Family> {
        if !graph.is_connected() {
            return None;
        }
        let markings = graph.markings();
        let nv = graph.n_vertices();
        match (graph.n_edges(), nv) {
            (0, 1) => Some(Family::Smooth),
            (1, 1) => Some(Family::Irr),
            (1, 2) => Some(prefer_pair(&markings, graph.genera[0], graph.legs_at(0), graph.genera[1], graph.legs_at(1), |a, side| Family::Sep { a, side })),
            (2, 1) => Some(Family::F),
            (2, 2) => {
                let loop_v = (0..2).find(|&v| graph.loops_at(v) > 0);
                match loop_v {
                    Some(v) => Some(Family::H { a: graph.genera[v], side: graph.legs_at(v) }),
                    None => Some(prefer_pair(&markings, graph.genera[0], graph.legs_at(0), graph.genera[1], graph.legs_at(1), |a, side| Family::E { a, side })),
                }
            }
            (2, 3) => {
                let deg: Vec<usize> = (0..3)
                    .map(|v| graph.edges.iter().filter(|&&(x, y)| x == v || y == v).count())
                    .collect();
                let mid = (0..3).find(|&v| deg[v] == 2)?;
                let ends: Vec<usize> = (0..3).filter(|&v| v != mid).collect();
                let (x, y) = (ends[0], ends[1]);
                let first = prefer_end(graph.genera[x], &graph.legs_at(x), graph.genera[y], &graph.legs_at(y));
                let (e0, _) = if first { (x, y) } else { (y, x) };
                Some(Family::G { a: graph.genera[e0], end: graph.legs_at(e0), b: graph.genera[mid], middle: graph.legs_at(mid) })
            }
            _ => None,
        }
    }
}

fn prefer_pair(
    markings: &[Marking],
    a0: u32,
    s0: Vec<Marking>,
    a1: u32,
    s1: Vec<Marking>,
    make: impl Fn(u32, Vec<Marking>) -> Family,
) -> Family {
    let first = match markings.iter().min() {
        Some(m) => s0.contains(m),
        None => a0 <= a1,
    };
    if first {
        make(a0, s0)
    } else {
        make(a1, s1)
    }
}

/// True if the end (a, sa) should be written first in a chain name.
fn prefer_end(a: u32, sa: &[Marking], c: u32, sc: &[Marking]) -> bool {
    if a != c {
        return a > c;
    }
    let min_a = sa.iter().min();
    let min_c = sc.iter().min();
    match (min_a, min_c) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => true,
    }
}

fn subsets(ms: &[Marking]) -> Vec<Vec<Marking>> {
    (0u64..(1 << ms.len()))
        .map(|mask| ms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, m)| m.clone()).collect())
        .collect()
}

/// All connected stable graphs of genus `g` with legs `markings` and exactly
/// `codim` edges, one per isomorphism class. Supports codim 0, 1, 2.
pub fn enumerate(g: u32, markings: &[Marking], codim: usize) -> Result<Vec<NamedGraph>> {
    if !super::space_is_stable(g, markings.len()) {
        return Err(Error::Unstable(format!("M_{{{g},{}}} is not stable", markings.len())));
    }
    let mut ms = markings.to_vec();
    ms.sort();
    ms.dedup();
    if ms.len() != markings.len() {
        return Err(Error::Parse("repeated marking".into()));
    }
    let mut families = Vec::new();
    match codim {
        0 => families.push(Family::Smooth),
        1 => {
            if g >= 1 {
                families.push(Family::Irr);
            }
            for a in 0..=g {
                for side in subsets(&ms) {
                    families.push(Family::Sep { a, side });
                }
            }
        }
        2 => {
            if g >= 2 {
                families.push(Family::F);
            }
            for a in 0..g {
                for side in subsets(&ms) {
                    families.push(Family::E { a, side: side.clone() });
                    families.push(Family::H { a, side });
                }
            }
            for a in 0..=g {
                for b in 0..=(g - a) {
                    for end in subsets(&ms) {
                        let rest = complement(&ms, &end);
                        for middle in subsets(&rest) {
                            families.push(Family::G { a, end: end.clone(), b, middle });
                        }
                    }
                }
            }
        }
        _ => return Err(Error::Unstable(format!("codimension {codim} is outside the supported range"))),
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for fam in families {
        let Ok(graph) = fam.build(g, &ms) else { continue };
        let key = canonical_key(&graph);
        if seen.insert(key.clone()) {
            let family = Family::classify(&graph).unwrap_or(fam);
            out.push(NamedGraph { family, graph, key });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marking::markings;

    #[test]
    fn small_counts() {
        let p4 = markings(&["1", "2", "3", "4"]);
        assert_eq!(enumerate(0, &p4, 1).unwrap().len(), 3);
        assert_eq!(enumerate(1, &markings(&["x"]), 1).unwrap().len(), 1);
        assert_eq!(enumerate(2, &[], 1).unwrap().len(), 2);
        assert_eq!(enumerate(2, &[], 2).unwrap().len(), 2);
    }

    #[test]
    fn classify_round_trip() {
        let p = markings(&["a", "b"]);
        for ng in enumerate(3, &p, 2).unwrap() {
            let again = ng.family.build(3, &p).unwrap();
            assert_eq!(canonical_key(&again), ng.key, "{}", ng.family);
        }
    }
}
