use super::kinds::{classify, Kind};
use super::{Decorated, Monomial, Space};
use crate::error::Result;
use crate::graph::{enumerate, Family};
use crate::marking::Marking;
use std::collections::{BTreeMap, BTreeSet};

/// Subspaces used to organise the essential basis in degree two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    /// kappa_1^2, kappa_2
    K,
    /// kappa_1 psi_i, psi_i^2, psi_i psi_j with i, j in part `p`
    Psi(usize),
    /// psi_i psi_j with i in part p, j in part q, p < q
    PsiPair(usize, usize),
    WK,
    WPsi,
    WPsiLeg(usize),
    WEF,
    WGH,
    Other,
}

impl Block {
    pub fn of(m: &Monomial, parts: &[Vec<Marking>]) -> Block {
        let part = |x: &Marking| parts.iter().position(|p| p.contains(x)).unwrap_or(parts.len());
        match classify(m) {
            Kind::Mumford { kappa, psi } => {
                let idx: Vec<usize> = psi.iter().flat_map(|(x, &e)| std::iter::repeat_n(part(x), e as usize)).collect();
                match (kappa.is_empty(), idx.as_slice()) {
                    (false, []) => Block::K,
                    (_, [p]) => Block::Psi(*p),
                    (true, [p, q]) if p == q => Block::Psi(*p),
                    (true, [p, q]) => Block::PsiPair(*p.min(q), *p.max(q)),
                    _ => Block::Other,
                }
            }
            Kind::KappaIrr | Kind::KappaSep(_) => Block::WK,
            Kind::PsiIrr | Kind::PsiSep(_) => Block::WPsi,
            Kind::PsiLegIrr(x) | Kind::PsiLegSep(x, _) => Block::WPsiLeg(part(&x)),
            Kind::Stratum(Family::F) | Kind::Stratum(Family::E { .. }) => Block::WEF,
            Kind::Stratum(Family::H { .. }) | Kind::Stratum(Family::G { .. }) => Block::WGH,
            _ => Block::Other,
        }
    }

    fn rank(&self) -> (usize, usize, usize) {
        match self {
            Block::K => (0, 0, 0),
            Block::Psi(p) => (1, *p, 0),
            Block::PsiPair(p, q) => (2, *p, *q),
            Block::WK => (3, 0, 0),
            Block::WPsi => (4, 0, 0),
            Block::WPsiLeg(p) => (5, *p, 0),
            Block::WEF => (6, 0, 0),
            Block::WGH => (7, 0, 0),
            Block::Other => (8, 0, 0),
        }
    }
}

fn mumford_degree(space: &Space, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let ms = &space.markings;
    match d {
        0 => out.push(Monomial::mumford(space, vec![], BTreeMap::new())),
        1 => {
            out.push(Monomial::mumford(space, vec![1], BTreeMap::new()));
            for x in ms {
                out.push(Monomial::mumford(space, vec![], [(x.clone(), 1)].into()));
            }
        }
        2 => {
            out.push(Monomial::mumford(space, vec![1, 1], BTreeMap::new()));
            out.push(Monomial::mumford(space, vec![2], BTreeMap::new()));
            for x in ms {
                out.push(Monomial::mumford(space, vec![1], [(x.clone(), 1)].into()));
            }
            for (i, x) in ms.iter().enumerate() {
                out.push(Monomial::mumford(space, vec![], [(x.clone(), 2)].into()));
                for y in &ms[i + 1..] {
                    out.push(Monomial::mumford(space, vec![], [(x.clone(), 1), (y.clone(), 1)].into()));
                }
            }
        }
        _ => {}
    }
    out.retain(|m| !m.vanishes());
    out
}

/// Every monomial of degree `d` (0, 1 or 2) on the space, without repetition.
pub fn degree_monomials(space: &Space, d: usize) -> Result<Vec<Monomial>> {
    let mut out: Vec<Monomial> = mumford_degree(space, d);
    let mut seen: BTreeSet<Monomial> = out.iter().cloned().collect();
    for c in 1..=d.min(2) {
        for ng in enumerate(space.genus, &space.markings, c)? {
            if c == d {
                let m = Monomial::stratum(&ng.graph);
                if seen.insert(m.clone()) {
                    out.push(m);
                }
                continue;
            }
            // one degree-one decoration on a divisor
            let g = &ng.graph;
            let mut decos = Vec::new();
            for v in 0..g.n_vertices() {
                let mut dec = Decorated::bare(g.clone());
                dec.add_kappa(v, 1);
                decos.push(dec);
            }
            for h in g.half_edges() {
                let mut dec = Decorated::bare(g.clone());
                dec.add_psi(&h, 1);
                decos.push(dec);
            }
            for dec in decos {
                let m = dec.canon();
                if !m.vanishes() && seen.insert(m.clone()) {
                    out.push(m);
                }
            }
        }
    }
    Ok(out)
}

/// Minimal genus of a vertex on which a degree-one decoration is kept:
/// psi needs genus at least 2, kappa at least 3.
fn decoration_kept(vertex_genus: u32, kappa: bool) -> bool {
    if kappa {
        vertex_genus >= 3
    } else {
        vertex_genus >= 2
    }
}

fn mumford_kept(space: &Space, kappa: &[u8], psi: &BTreeMap<Marking, u8>) -> bool {
    let g = space.genus;
    let n_psi: usize = psi.values().map(|&e| e as usize).sum();
    let k1 = kappa.iter().filter(|&&a| a == 1).count();
    let k2 = kappa.iter().filter(|&&a| a == 2).count();
    match (k1, k2, n_psi) {
        (2, 0, 0) => g >= 5 || (g == 4 && space.markings.is_empty()),
        (0, 1, 0) => g >= 6,
        (1, 0, 1) => g >= 4,
        (0, 0, 2) => g >= 3,
        _ => false,
    }
}

fn keel_kept(m: &Monomial, g: u32, order: &[Marking]) -> bool {
    let graph = m.graph();
    let pos = |x: &Marking| order.iter().position(|y| y == x).unwrap_or(usize::MAX);
    let deg: Vec<usize> = (0..3).map(|v| graph.edges.iter().filter(|&&(a, b)| a == v || b == v).count()).collect();
    let Some(mid) = (0..3).find(|&v| deg[v] == 2) else { return true };
    if graph.genera[mid] != 0 {
        return true;
    }
    let ends: Vec<usize> = (0..3).filter(|&v| v != mid).collect();
    let mut qualifying = 0;
    for (x, y) in [(ends[0], ends[1]), (ends[1], ends[0])] {
        if graph.genera[x] != 0 || graph.genera[y] != g {
            continue;
        }
        qualifying += 1;
        let b = graph.legs_at(x);
        let c = graph.legs_at(mid);
        if b.len() >= 3 {
            return true;
        }
        let max_b = b.iter().map(pos).max().unwrap_or(0);
        let min_c = c.iter().map(pos).min().unwrap_or(usize::MAX);
        if max_b < min_c {
            return true;
        }
    }
    qualifying == 0
}

/// Membership in the essential set B^4 for the given order on the markings.
pub fn is_essential(m: &Monomial, space: &Space, order: &[Marking]) -> bool {
    if m.degree() != 2 {
        return false;
    }
    match classify(m) {
        Kind::Mumford { kappa, psi } => mumford_kept(space, &kappa, &psi),
        Kind::KappaIrr => decoration_kept(space.genus.saturating_sub(1), true),
        Kind::PsiIrr | Kind::PsiLegIrr(_) => decoration_kept(space.genus.saturating_sub(1), false),
        Kind::KappaSep(s) => decoration_kept(s.a, true),
        Kind::PsiSep(s) | Kind::PsiLegSep(_, s) => decoration_kept(s.a, false),
        Kind::Stratum(Family::G { .. }) => keel_kept(m, space.genus, order),
        Kind::Stratum(_) => true,
        Kind::Other => false,
    }
}

/// The essential set B^4(g, P), grouped by block and sorted inside blocks.
/// `order` defaults to the marking order of the space.
pub fn essential_basis(space: &Space, order: Option<&[Marking]>) -> Result<Vec<Monomial>> {
    let order = order.unwrap_or(&space.markings);
    let parts = vec![space.markings.clone()];
    let mut out: Vec<Monomial> = degree_monomials(space, 2)?.into_iter().filter(|m| is_essential(m, space, order)).collect();
    out.sort_by(|x, y| Block::of(x, &parts).rank().cmp(&Block::of(y, &parts).rank()).then_with(|| x.cmp(y)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marking::markings;

    #[test]
    fn genus_two_no_markings() {
        let sp = Space::new(2, &[]).unwrap();
        let b = essential_basis(&sp, None).unwrap();
        let names: Vec<String> = b.iter().map(|m| m.name()).collect();
        assert_eq!(names, ["delta_F", "delta_H(0,{})"]);
    }

    #[test]
    fn degree_one_counts() {
        let sp = Space::new(3, &markings(&["a"])).unwrap();
        // kappa1, psi_a, delta_irr, delta(1,{}), delta(1,{a})
        let d1 = degree_monomials(&sp, 1).unwrap();
        assert_eq!(d1.len(), 5);
    }
}
