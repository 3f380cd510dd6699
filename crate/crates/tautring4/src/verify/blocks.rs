//! Matrices of pullback maps on essential classes and the ranks of their
//! diagonal blocks.

use crate::calculus::boundary_map;
use crate::error::{Error, Result};
use crate::expr::{classify, essential_basis, Block, Kind, Monomial, Space, TautExpr, TensorExpr};
use crate::graph::{Family, StableGraph};
use crate::linalg::RationalMatrix;
use crate::marking::Marking;
use crate::relations::{catalog, divisor_catalog, eliminated_first};
use crate::Q;
use itertools::Itertools;
use std::collections::BTreeMap;
use std::fmt;

/// Matrix whose column j holds the coordinates of `image(source[j])` in
/// `target`. Fails on an image term outside `target`.
pub fn matrix_of_map<K: Ord + Clone + fmt::Debug>(
    source: &[Monomial],
    target: &[K],
    image: &dyn Fn(&Monomial) -> Result<Vec<(K, Q)>>,
) -> Result<RationalMatrix> {
    let index: BTreeMap<&K, usize> = target.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut entries = Vec::new();
    for (j, m) in source.iter().enumerate() {
        for (k, c) in image(m)? {
            let &i = index
                .get(&k)
                .ok_or_else(|| Error::Catalog(format!("image of {} has a term outside the target basis: {k:?}", m.name())))?;
            entries.push((i, j, c));
        }
    }
    Ok(RationalMatrix::from_triplets(target.len(), source.len(), &entries))
}

/// One diagonal block: source classes of a type against target
/// coordinates of the same type.
#[derive(Clone, Debug)]
pub struct BlockRank {
    pub name: String,
    pub sources: usize,
    pub targets: usize,
    pub rank: usize,
}

impl BlockRank {
    pub fn maximal(&self) -> bool {
        self.rank == self.sources
    }
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub lemma: String,
    pub space: Space,
    pub map: String,
    pub source: Vec<Monomial>,
    /// Names of the target coordinates, in row order.
    pub target: Vec<String>,
    pub matrix: RationalMatrix,
    pub rank: usize,
    pub blocks: Vec<BlockRank>,
}

impl RankReport {
    pub fn injective(&self) -> bool {
        self.rank == self.source.len()
    }

    pub fn blocks_maximal(&self) -> bool {
        self.blocks.iter().all(BlockRank::maximal)
    }
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} on {}: {}", self.lemma, self.space, self.map)?;
        writeln!(
            f,
            "  rank {} of {} source classes, {} target coordinates: {}",
            self.rank,
            self.source.len(),
            self.target.len(),
            if self.injective() { "injective" } else { "NOT injective" }
        )?;
        for b in &self.blocks {
            writeln!(
                f,
                "  block {:<12} {:>4} x {:<4} rank {:>4}  {}",
                b.name,
                b.sources,
                b.targets,
                b.rank,
                if b.maximal() { "maximal" } else { "DEFICIENT" }
            )?;
        }
        Ok(())
    }
}

/// Terms of `t` whose factors other than `keep` are fundamental classes.
fn factor_part(t: &TensorExpr, keep: usize) -> TautExpr {
    let mut e = TautExpr::zero(&t.factors[keep]);
    for (ms, c) in &t.terms {
        if ms.iter().enumerate().all(|(i, m)| i == keep || m.degree() == 0) {
            e.add_term(ms[keep].clone(), c.clone());
        }
    }
    e
}

fn block_ranks<K: Clone>(
    matrix: &RationalMatrix,
    source: &[Monomial],
    target: &[K],
    names: &[&str],
    source_type: &dyn Fn(&Monomial) -> Option<usize>,
    target_type: &dyn Fn(&K) -> Option<usize>,
) -> Vec<BlockRank> {
    names
        .iter()
        .enumerate()
        .map(|(b, name)| {
            let cols: Vec<usize> = (0..source.len()).filter(|&j| source_type(&source[j]) == Some(b)).collect();
            let rows: Vec<usize> = (0..target.len()).filter(|&i| target_type(&target[i]) == Some(b)).collect();
            let rank = matrix.select(&rows, &cols).rank();
            BlockRank { name: name.to_string(), sources: cols.len(), targets: rows.len(), rank }
        })
        .collect()
}

fn irr_graph(space: &Space) -> Result<StableGraph> {
    Family::Irr.build(space.genus, &space.markings)
}

const PIU_BLOCKS: [&str; 7] = ["A (K)", "B (Psi_P)", "C (W_K)", "D (W_Psi)", "E (W_PsiP)", "F (W_EF)", "G (W_GH)"];

fn piu_type(b: &Block) -> Option<usize> {
    match b {
        Block::K => Some(0),
        Block::Psi(0) => Some(1),
        Block::WK => Some(2),
        Block::WPsi => Some(3),
        Block::WPsiLeg(0) => Some(4),
        Block::WEF => Some(5),
        Block::WGH => Some(6),
        _ => None,
    }
}

/// The pullback along the irreducible divisor, from the essential classes
/// on (g, P) to the reduced basis on (g-1, P + {q, r}), with the blocks of
/// the decomposition by subspace type.
pub fn piudisette_report(space: &Space) -> Result<RankReport> {
    if space.genus < 2 {
        return Err(Error::Unstable("the irreducible divisor needs genus at least two here".into()));
    }
    let map = boundary_map(space, &irr_graph(space)?)?;
    let target_space = map.factors[0].clone();
    let cat = catalog(&target_space)?;
    let source = essential_basis(space, None)?;
    let target = cat.reduced_basis();
    let image = |m: &Monomial| -> Result<Vec<(Monomial, Q)>> {
        let t = map.pullback(&TautExpr::from_monomial(space, m.clone()))?;
        Ok(cat.normal_form(&factor_part(&t, 0))?.terms.into_iter().collect())
    };
    let matrix = matrix_of_map(&source, &target, &image)?;
    let p = space.markings.clone();
    let o: Vec<Marking> = map.cut.to_vec();
    let src_parts = vec![p.clone()];
    let tgt_parts = vec![p, o];
    let blocks = block_ranks(
        &matrix,
        &source,
        &target,
        &PIU_BLOCKS,
        &|m| piu_type(&Block::of(m, &src_parts)),
        &|m| piu_type(&Block::of(m, &tgt_parts)),
    );
    Ok(RankReport {
        lemma: "piudisette".into(),
        space: space.clone(),
        map: format!("xi_irr^* into {target_space}"),
        rank: matrix.rank(),
        target: target.iter().map(|m| m.name()).collect(),
        source,
        matrix,
        blocks,
    })
}

const DUE_BLOCKS: [&str; 10] =
    ["A (W_F)", "B (W_E)", "C (W_H0)", "D (W_G10)", "E (W_G02+psi_s)", "F (W_G20)", "G (W_H1)", "H (W_G11)", "I (W_psi)", "L (W_psiP)"];

/// Type of a genus-two class in the decomposition; `new` is the marking
/// created by the gluing, if any.
fn due_type(m: &Monomial, new: Option<&Marking>) -> Option<usize> {
    match classify(m) {
        Kind::Stratum(Family::F) => Some(0),
        Kind::Stratum(Family::E { .. }) => Some(1),
        Kind::Stratum(Family::H { a: 0, .. }) => Some(2),
        Kind::Stratum(Family::H { a: 1, .. }) => Some(6),
        Kind::Stratum(Family::G { a, b, .. }) => {
            let far = 2 - a - b;
            match (b, a.min(far)) {
                (0, 1) => Some(3),
                (2, _) => Some(4),
                (0, 0) => Some(5),
                (1, _) => Some(7),
                _ => None,
            }
        }
        Kind::PsiSep(s) if s.a == 2 => Some(8),
        Kind::PsiLegSep(x, s) if s.a == 2 => Some(if Some(&x) == new { 4 } else { 9 }),
        _ => None,
    }
}

/// C^4_{2,P}: essential classes other than pure Mumford classes and the
/// psi_i delta(2, P - {j,k}) with i before j, k.
pub fn due_source(space: &Space) -> Result<Vec<Monomial>> {
    Ok(essential_basis(space, None)?
        .into_iter()
        .filter(|m| m.codim() > 0 && !eliminated_first(m, space, &space.markings))
        .collect())
}

/// f = (f_ij^*) over all pairs of markings: pullback along the rational
/// tail carrying i and j, onto the genus-two factor.
pub fn due_report(space: &Space) -> Result<RankReport> {
    if space.genus != 2 {
        return Err(Error::AmbientMismatch("this map is defined in genus two".into()));
    }
    let source = due_source(space)?;
    let mut maps = Vec::new();
    for pair in space.markings.iter().cloned().combinations(2) {
        let div = Family::Sep { a: 0, side: pair.clone() }.build(2, &space.markings)?;
        let map = boundary_map(space, &div)?;
        let keep = map.factors.iter().position(|f| f.genus == 2).expect("genus-two factor");
        let tgt = map.factors[keep].clone();
        let new = map.cut.iter().find(|c| tgt.markings.contains(c)).cloned();
        maps.push((pair, map, keep, tgt, new));
    }
    let mut target: Vec<(usize, Monomial)> = Vec::new();
    let mut target_types = Vec::new();
    for (k, (_, _, _, tgt, new)) in maps.iter().enumerate() {
        for m in catalog(tgt)?.reduced_basis() {
            target_types.push(due_type(&m, new.as_ref()));
            target.push((k, m));
        }
    }
    let image = |m: &Monomial| -> Result<Vec<((usize, Monomial), Q)>> {
        let mut out = Vec::new();
        for (k, (_, map, keep, tgt, _)) in maps.iter().enumerate() {
            let t = map.pullback(&TautExpr::from_monomial(space, m.clone()))?;
            let nf = catalog(tgt)?.normal_form(&factor_part(&t, *keep))?;
            out.extend(nf.terms.into_iter().map(|(x, c)| ((k, x), c)));
        }
        Ok(out)
    };
    let matrix = matrix_of_map(&source, &target, &image)?;
    let type_of: BTreeMap<(usize, Monomial), Option<usize>> = target.iter().cloned().zip(target_types).collect();
    let blocks = block_ranks(&matrix, &source, &target, &DUE_BLOCKS, &|m| due_type(m, None), &|k| type_of[k]);
    Ok(RankReport {
        lemma: "due".into(),
        space: space.clone(),
        map: format!("f = sum of f_ij^* over {} pairs", maps.len()),
        rank: matrix.rank(),
        target: target.iter().map(|(k, m)| format!("[{}] {}", maps[*k].0.iter().join(""), m.name())).collect(),
        source,
        matrix,
        blocks,
    })
}

/// H^2 of M(0,P) against the rational tails carrying pairs in P - {h},
/// h the first marking.
pub fn inj0h2_report(space: &Space) -> Result<RankReport> {
    if space.genus != 0 || space.n() < 5 {
        return Err(Error::AmbientMismatch("this map is defined on M(0,P) with at least five markings".into()));
    }
    let dc = divisor_catalog(space)?;
    let source = dc.basis();
    let h = space.markings[0].clone();
    let rest: Vec<Marking> = space.markings.iter().filter(|m| **m != h).cloned().collect();
    let mut maps = Vec::new();
    for pair in rest.into_iter().combinations(2) {
        let div = Family::Sep { a: 0, side: pair.clone() }.build(0, &space.markings)?;
        let map = boundary_map(space, &div)?;
        let keep = map.factors.iter().position(|f| f.n() > 3).expect("a factor with more than three points");
        let tgt = map.factors[keep].clone();
        maps.push((pair, map, keep, tgt));
    }
    let mut target = Vec::new();
    for (k, (_, _, _, tgt)) in maps.iter().enumerate() {
        for m in divisor_catalog(tgt)?.basis() {
            target.push((k, m));
        }
    }
    let image = |m: &Monomial| -> Result<Vec<((usize, Monomial), Q)>> {
        let mut out = Vec::new();
        for (k, (_, map, keep, tgt)) in maps.iter().enumerate() {
            let t = map.pullback(&TautExpr::from_monomial(space, m.clone()))?;
            let nf = divisor_catalog(tgt)?.normal_form(&factor_part(&t, *keep))?;
            out.extend(nf.terms.into_iter().map(|(x, c)| ((k, x), c)));
        }
        Ok(out)
    };
    let matrix = matrix_of_map(&source, &target, &image)?;
    Ok(RankReport {
        lemma: "inj0h2".into(),
        space: space.clone(),
        map: format!("rational tails through {} pairs avoiding {h}", maps.len()),
        rank: matrix.rank(),
        target: target.iter().map(|(k, m)| format!("[{}] {}", maps[*k].0.iter().join(""), m.name())).collect(),
        source,
        matrix,
        blocks: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    Piudisette,
    Due,
    Inj0h2,
}

impl std::str::FromStr for Lemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "piudisette" => Ok(Lemma::Piudisette),
            "due" => Ok(Lemma::Due),
            "inj0h2" => Ok(Lemma::Inj0h2),
            _ => Err(Error::Parse(format!("unknown lemma {s:?}"))),
        }
    }
}

/// Picks the decomposition from the genus unless `lemma` is given.
pub fn block_rank_report(space: &Space, lemma: Option<Lemma>) -> Result<RankReport> {
    let lemma = lemma.unwrap_or(match space.genus {
        0 => Lemma::Inj0h2,
        2 => Lemma::Due,
        _ => Lemma::Piudisette,
    });
    match lemma {
        Lemma::Piudisette => piudisette_report(space),
        Lemma::Due => due_report(space),
        Lemma::Inj0h2 => inj0h2_report(space),
    }
}
