//! The reproduction suite. Each check recomputes one published claim with
//! the engine, compares it with an independent construction or with the
//! printed value, and reports a verdict with its evidence.

use super::blocks::{due_report, inj0h2_report, piudisette_report, RankReport};
use super::brute::{bound_count, brute_automorphisms, brute_graphs, brute_isomorphic};
use super::consistency::relation_checks;
use super::m32::rederive_m32;
use crate::calculus::{boundary_map, forget_pullback, multiply};
use crate::error::Result;
use crate::expr::{degree_monomials, essential_basis, Decorated, Monomial, Space, TautExpr, TensorExpr};
use crate::graph::{aut_count, canonical_key, enumerate, space_is_stable, CanonKey, Family, HalfEdge, StableGraph};
use crate::marking::Marking;
use crate::relations::{catalog, natives};
use crate::Q;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub lines: Vec<String>,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {} {}", self.id, self.name)?;
        for l in &self.lines {
            write!(f, "\n    {l}")?;
        }
        Ok(())
    }
}

pub const CHECKS: [(usize, &str); 9] = [
    (1, "graph enumeration against brute force"),
    (2, "automorphism counts against brute force"),
    (3, "self-intersection displays"),
    (4, "pullback displays"),
    (5, "native relations under boundary and forgetful pullbacks"),
    (6, "re-derivation of the relation on M(3,2)"),
    (7, "block ranks"),
    (8, "dimension count in genus 8"),
    (9, "property suites"),
];

pub fn run(id: usize) -> Result<Check> {
    let name = CHECKS.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown check");
    let (pass, lines) = match id {
        1 => enumeration()?,
        2 => automorphisms()?,
        3 => products()?,
        4 => pullbacks()?,
        5 => natives_consistent()?,
        6 => m32()?,
        7 => ranks()?,
        8 => counting()?,
        9 => properties()?,
        _ => (false, vec![format!("no check numbered {id}")]),
    };
    Ok(Check { id, name, pass, lines })
}

pub fn run_all() -> Result<Vec<Check>> {
    CHECKS.iter().map(|c| run(c.0)).collect()
}

type Outcome = (bool, Vec<String>);

fn points(n: usize) -> Vec<Marking> {
    (1..=n).map(|i| Marking::point(i.to_string())).collect()
}

fn space(g: u32, n: usize) -> Result<Space> {
    Space::new(g, &points(n))
}

fn stratum(space: &Space, graph: &StableGraph) -> TautExpr {
    TautExpr::from_monomial(space, Monomial::stratum(graph))
}

fn with_psi(space: &Space, graph: &StableGraph, h: HalfEdge, c: i64) -> TautExpr {
    let mut d = Decorated::bare(graph.clone());
    d.add_psi(&h, 1);
    TautExpr::from_monomial(space, d.canon()).scaled(&Q::from_integer(c.into()))
}

fn describe(e: &TautExpr) -> String {
    e.terms.iter().map(|(m, c)| format!("{} {}", crate::expr::format_q(c), m.name())).collect::<Vec<_>>().join(" + ")
}

fn enumeration() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut classes = 0;
    for g in 0..=4u32 {
        for n in 0..=4 {
            if !space_is_stable(g, n) {
                continue;
            }
            let ms = points(n);
            for codim in 0..=2 {
                let lib = enumerate(g, &ms, codim)?;
                let brute = brute_graphs(g, &ms, codim);
                let lib_keys: BTreeSet<CanonKey> = lib.iter().map(|x| x.key.clone()).collect();
                let brute_keys: BTreeSet<CanonKey> = brute.iter().map(canonical_key).collect();
                let forms = lib.iter().all(|x| {
                    brute.iter().filter(|b| brute_isomorphic(b, &x.graph)).count() == 1
                        && brute_isomorphic(&x.key.graph(), &x.graph)
                });
                classes += brute.len();
                if lib.len() != brute.len() || lib_keys != brute_keys || lib_keys.len() != lib.len() || !forms {
                    lines.push(format!("M({g},{n}) codim {codim}: {} enumerated, {} by brute force", lib.len(), brute.len()));
                }
            }
        }
    }
    let pass = lines.is_empty();
    lines.insert(0, format!("{classes} isomorphism classes over g <= 4, n <= 4, codim <= 2"));
    Ok((pass, lines))
}

fn automorphisms() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut graphs = 0;
    for g in 0..=4u32 {
        for n in 0..=4 {
            for codim in 0..=3 {
                if 2 * codim + n > 8 {
                    continue;
                }
                for graph in brute_graphs(g, &points(n), codim) {
                    graphs += 1;
                    let brute = brute_automorphisms(&graph).len() as u64;
                    let lib = aut_count(&graph);
                    if brute != lib {
                        lines.push(format!("{graph:?}: {lib} from the canonical form, {brute} by brute force"));
                    }
                }
            }
        }
    }
    let mut pass = lines.is_empty();
    lines.insert(0, format!("{graphs} graphs with at most 8 half-edges"));
    for g in [3u32, 5] {
        let e = Family::E { a: (g - 1) / 2, side: vec![] }.build(g, &[])?;
        let (lib, brute) = (aut_count(&e), brute_automorphisms(&e).len());
        pass &= lib == 4 && brute == 4;
        lines.push(format!("E({},{{}}) on M({g}), both vertices of genus {}: |Aut| = {lib} (brute force {brute})", (g - 1) / 2, (g - 1) / 2));
    }
    Ok((pass, lines))
}

/// The displayed expansions of delta_irr^2 and delta_{a,A}^2, with
/// psi|delta_{a,A} = xi_*(psi_s (x) 1)/|Aut|.
fn products() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for (g, n) in [(2u32, 0usize), (3, 0), (3, 1), (4, 0)] {
        let sp = space(g, n)?;
        let ms = sp.markings.clone();
        let irr = Family::Irr.build(g, &ms)?;
        let mut expect = with_psi(&sp, &irr, HalfEdge::Edge(0, 0), -2);
        expect.add_scaled(&stratum(&sp, &Family::F.build(g, &ms)?), &Q::from_integer(2.into()));
        for ng in enumerate(g, &ms, 2)? {
            if matches!(ng.family, Family::E { .. }) {
                expect.add_scaled(&stratum(&sp, &ng.graph), &Q::from_integer(2.into()));
            }
        }
        let got = multiply(&stratum(&sp, &irr), &stratum(&sp, &irr))?;
        let diff = got.sub(&expect);
        pass &= diff.is_zero();
        lines.push(format!("{sp} delta_irr^2: {}", if diff.is_zero() { "matches".to_string() } else { describe(&diff) }));

        let mut seps = 0;
        let mut bad = Vec::new();
        for ng in enumerate(g, &ms, 1)? {
            let Family::Sep { a, side } = &ng.family else { continue };
            let graph = ng.family.build(g, &ms)?;
            let mut expect = with_psi(&sp, &graph, HalfEdge::Edge(0, 0), -1);
            expect.add_scaled(&with_psi(&sp, &graph, HalfEdge::Edge(0, 1), -1), &Q::one());
            let aut = brute_automorphisms(&graph).len() as i64;
            let chain = if side.len() == ms.len() && 2 * a >= g {
                Family::G { a: g - a, end: vec![], b: 2 * a - g, middle: ms.clone() }.build(g, &ms).ok()
            } else if side.is_empty() && g >= 2 * a {
                Family::G { a: *a, end: vec![], b: g - 2 * a, middle: ms.clone() }.build(g, &ms).ok()
            } else {
                None
            };
            if let Some(c) = chain {
                expect.add_scaled(&stratum(&sp, &c), &Q::new(2.into(), aut.into()));
            }
            let d = stratum(&sp, &graph);
            let diff = multiply(&d, &d)?.sub(&expect);
            seps += 1;
            if !diff.is_zero() {
                bad.push(format!("{sp} delta{}^2 differs by {}", ng.family, describe(&diff)));
            }
        }
        pass &= bad.is_empty();
        lines.push(format!("{sp} {seps} separating divisors squared: {} differ", bad.len()));
        lines.extend(bad);
    }
    Ok((pass, lines))
}

fn aux(sp: &Space, factor: &Space) -> Vec<Marking> {
    factor.markings.iter().filter(|m| !sp.markings.contains(m)).cloned().collect()
}

fn separates(side: &[Marking], q: &Marking, r: &Marking) -> bool {
    side.contains(q) != side.contains(r)
}

/// xi_irr^* of delta_irr and delta_F, and the self-pullback of a separating
/// divisor with markings on both sides.
fn pullbacks() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for g in [3u32, 4] {
        let sp = space(g, 0)?;
        let irr = Family::Irr.build(g, &[])?;
        let map = boundary_map(&sp, &irr)?;
        let tgt = map.factors[0].clone();
        let [q, r] = <[Marking; 2]>::try_from(aux(&sp, &tgt)).expect("two new legs");
        let psi = |x: &Marking| {
            TautExpr::from_monomial(&tgt, Monomial::mumford(&tgt, vec![], [(x.clone(), 1)].into()))
        };

        let t_irr = Family::Irr.build(g - 1, &tgt.markings)?;
        let mut expect = stratum(&tgt, &t_irr);
        for ng in enumerate(g - 1, &tgt.markings, 1)? {
            if let Family::Sep { side, .. } = &ng.family {
                if separates(side, &q, &r) {
                    expect.add_scaled(&stratum(&tgt, &ng.graph), &Q::one());
                }
            }
        }
        expect.add_scaled(&psi(&q), &-Q::one());
        expect.add_scaled(&psi(&r), &-Q::one());
        let got = map.pullback(&stratum(&sp, &irr))?.into_single();
        let diff = got.sub(&expect);
        pass &= diff.is_zero();
        lines.push(format!("{sp} xi_irr^*(delta_irr): {}", if diff.is_zero() { "matches".into() } else { describe(&diff) }));

        let mut expect = stratum(&tgt, &Family::F.build(g - 1, &tgt.markings)?);
        for x in [&q, &r] {
            expect.add_scaled(&with_psi(&tgt, &t_irr, HalfEdge::Leg(x.clone()), -1), &Q::one());
        }
        for ng in enumerate(g - 1, &tgt.markings, 2)? {
            match &ng.family {
                Family::E { side, .. } | Family::H { side, .. } if separates(side, &q, &r) => {
                    expect.add_scaled(&stratum(&tgt, &ng.graph), &Q::one());
                }
                _ => {}
            }
        }
        let f = Family::F.build(g, &[])?;
        let got = map.pullback(&stratum(&sp, &f))?.into_single();
        let diff = got.sub(&expect);
        pass &= diff.is_zero();
        lines.push(format!("{sp} xi_irr^*(delta_F): {}", if diff.is_zero() { "matches".into() } else { describe(&diff) }));
    }

    let mut count = 0;
    for (g, n) in [(1u32, 2usize), (2, 2), (3, 2), (2, 3), (3, 3)] {
        let sp = space(g, n)?;
        for ng in enumerate(g, &sp.markings, 1)? {
            let Family::Sep { side, .. } = &ng.family else { continue };
            if side.is_empty() || side.len() == n {
                continue;
            }
            let map = boundary_map(&sp, &ng.graph)?;
            let mut expect = TensorExpr::zero(&map.factors);
            for (i, f) in map.factors.iter().enumerate() {
                let mut ms: Vec<Monomial> = map.factors.iter().map(|x| Monomial::mumford(x, vec![], BTreeMap::new())).collect();
                ms[i] = Monomial::mumford(f, vec![], [(aux(&sp, f)[0].clone(), 1)].into());
                expect.add_term(ms, -Q::one());
            }
            let mut diff = map.pullback(&stratum(&sp, &ng.graph))?;
            diff.add_scaled(&expect, &-Q::one());
            count += 1;
            if !diff.is_zero() {
                pass = false;
                lines.push(format!("{sp} xi^*(delta{}) is not -psi_s(x)1 - 1(x)psi_t", ng.family));
            }
        }
    }
    lines.push(format!("{count} separating divisors with markings on both sides: self-pullback checked"));
    Ok((pass, lines))
}

fn natives_consistent() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in natives()? {
        let sp = &n.expr.space;
        if sp.genus > 3 || sp.n() > 3 {
            continue;
        }
        let used = relation_checks(&n.expr)?;
        let used_bad = used.iter().filter(|c| !c.ok()).count();
        let printed = match &n.printed {
            Some(p) => {
                let checks = relation_checks(p)?;
                let bad = checks.iter().filter(|c| !c.ok()).count();
                if bad == 0 {
                    "printed form vanishes on all maps".to_string()
                } else {
                    format!("printed form survives on {bad} of {} maps", checks.len())
                }
            }
            None => "printed form cannot be formed".to_string(),
        };
        let printed_ok = printed.starts_with("printed form vanishes");
        pass &= printed_ok && used_bad == 0;
        let fixes = if n.corrections.is_empty() {
            String::new()
        } else {
            format!("; with {} recorded corrections {} of {} maps fail", n.corrections.len(), used_bad, used.len())
        };
        lines.push(format!("{} on {sp}: {printed}{fixes}", n.id));
    }
    Ok((pass, lines))
}

fn m32() -> Result<Outcome> {
    let r = rederive_m32()?;
    let mut lines = vec![
        format!("{} unknowns, pullbacks along {}, solution space of dimension {}", r.unknowns, r.maps.join(", "), r.kernel_dim),
        format!("table: {} of {} coefficients agree", r.table.iter().filter(|c| c.ok()).count(), r.table.len()),
    ];
    lines.extend(r.table.iter().filter(|c| !c.ok()).map(|c| c.to_string()));
    lines.push(format!("display: {} of {} coefficients agree", r.display.iter().filter(|c| c.ok()).count(), r.display.len()));
    lines.extend(r.display.iter().filter(|c| !c.ok()).map(|c| c.to_string()));
    Ok((r.ok(), lines))
}

fn rank_line(r: &RankReport) -> String {
    let weak: Vec<String> =
        r.blocks.iter().filter(|b| !b.maximal()).map(|b| format!("{} {}/{}", b.name, b.rank, b.sources)).collect();
    let blocks = if r.blocks.is_empty() {
        String::new()
    } else if weak.is_empty() {
        format!(", all {} blocks maximal", r.blocks.len())
    } else {
        format!(", blocks short of maximal: {}", weak.join(", "))
    };
    format!("{} on {}: rank {} of {}{blocks}", r.lemma, r.space, r.rank, r.source.len())
}

fn ranks() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for sp in [Space::new(7, &[])?, Space::new(7, &[Marking::point("x")])?] {
        let r = piudisette_report(&sp)?;
        pass &= r.injective() && r.blocks_maximal();
        lines.push(rank_line(&r));
    }
    for n in [5, 6] {
        let r = inj0h2_report(&space(0, n)?)?;
        pass &= r.injective();
        lines.push(rank_line(&r));
    }
    let r = due_report(&space(2, 5)?)?;
    pass &= r.injective();
    lines.push(rank_line(&r));
    let r = due_report(&space(2, 4)?)?;
    if let Some(b) = r.blocks.iter().find(|b| b.name.starts_with("G ")) {
        lines.push(format!("due on {}: block {} rank {} of {} (not part of the verdict)", r.space, b.name, b.rank, b.sources));
    }
    Ok((pass, lines))
}

fn counting() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for sp in [Space::new(8, &[])?, Space::new(8, &[Marking::point("x")])?] {
        let basis = essential_basis(&sp, None)?;
        let by = |c: usize| basis.iter().filter(|m| m.codim() == c).count();
        let (mumford, mixed, pure) = (by(0), by(1), by(2));
        let bound = bound_count(sp.genus, &sp.markings);
        let ok = basis.len() == bound.total()
            && pure == bound.pure_boundary
            && mumford == bound.mumford
            && mixed == bound.mixed;
        pass &= ok;
        lines.push(format!(
            "{sp}: basis {} = {pure} + {mumford} + {mixed}; bound {} = r {} + Mumford {} + invariant divisor classes {}",
            basis.len(),
            bound.total(),
            bound.pure_boundary,
            bound.mumford,
            bound.mixed
        ));
    }
    Ok((pass, lines))
}

fn rational(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=6).into())
}

/// The same decorated graph with vertices, edges and edge sides shuffled.
fn shuffle(d: &Decorated, rng: &mut ChaCha8Rng) -> Decorated {
    let n = d.graph.genera.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut genera = vec![0; n];
    let mut kappa = vec![Vec::new(); n];
    for v in 0..n {
        genera[perm[v]] = d.graph.genera[v];
        kappa[perm[v]] = d.kappa[v].clone();
    }
    let mut order: Vec<usize> = (0..d.graph.edges.len()).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut edge_psi = Vec::new();
    for e in order {
        let (a, b) = d.graph.edges[e];
        let [pa, pb] = d.edge_psi[e];
        if rng.gen_bool(0.5) {
            edges.push((perm[b], perm[a]));
            edge_psi.push([pb, pa]);
        } else {
            edges.push((perm[a], perm[b]));
            edge_psi.push([pa, pb]);
        }
    }
    let legs = d.graph.legs.iter().map(|(m, &v)| (m.clone(), perm[v])).collect();
    Decorated { graph: StableGraph { genera, edges, legs }, kappa, leg_psi: d.leg_psi.clone(), edge_psi }
}

fn random_decorated(graphs: &[StableGraph], rng: &mut ChaCha8Rng) -> Decorated {
    let graph = graphs.choose(rng).expect("some graph").clone();
    let mut d = Decorated::bare(graph.clone());
    let mut budget = 2 - graph.codim();
    while budget > 0 && rng.gen_bool(0.7) {
        let halves = graph.half_edges();
        if budget == 2 && rng.gen_bool(0.2) {
            d.add_kappa(rng.gen_range(0..graph.genera.len()), 2);
            budget = 0;
        } else if halves.is_empty() || rng.gen_bool(0.3) {
            d.add_kappa(rng.gen_range(0..graph.genera.len()), 1);
            budget -= 1;
        } else {
            d.add_psi(halves.choose(rng).expect("a half-edge"), 1);
            budget -= 1;
        }
    }
    d
}

fn random_degree_two(sp: &Space, pool: &[Monomial], rng: &mut ChaCha8Rng) -> TautExpr {
    let mut e = TautExpr::zero(sp);
    for _ in 0..rng.gen_range(1..=6) {
        e.add_term(pool.choose(rng).expect("a monomial").clone(), rational(rng));
    }
    e
}

fn properties() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lines = Vec::new();

    let spaces = [space(1, 2)?, space(2, 2)?, space(3, 1)?, space(2, 0)?, space(0, 5)?];
    let graphs: Vec<Vec<StableGraph>> = spaces
        .iter()
        .map(|sp| {
            (0..=2).map(|c| enumerate(sp.genus, &sp.markings, c)).collect::<Result<Vec<_>>>().map(|v| v.into_iter().flatten().map(|x| x.graph).collect())
        })
        .collect::<Result<_>>()?;
    let mut bad = 0;
    for _ in 0..1000 {
        let i = rng.gen_range(0..spaces.len());
        let mut a = TautExpr::zero(&spaces[i]);
        let mut b = TautExpr::zero(&spaces[i]);
        for _ in 0..rng.gen_range(1..=4) {
            let d = random_decorated(&graphs[i], &mut rng);
            let c = rational(&mut rng);
            let m = shuffle(&d, &mut rng).canon();
            if m.decorated().canon() != m || shuffle(&m.decorated(), &mut rng).canon() != m {
                bad += 1;
            }
            a.add_term(m, c.clone());
            b.add_term(shuffle(&d, &mut rng).canon(), c);
        }
        if a != b {
            bad += 1;
        }
    }
    lines.push(format!("normalization: 1000 random expressions, {bad} failures"));
    let mut failures = bad;

    let mut bad = 0;
    let mut checked = 0;
    for sp in [space(2, 3)?, space(1, 4)?] {
        let cat = catalog(&sp)?;
        for _ in 0..50 {
            let mut image = sp.markings.clone();
            image.shuffle(&mut rng);
            let map: BTreeMap<Marking, Marking> = sp.markings.iter().cloned().zip(image).collect();
            for rel in &cat.relations {
                checked += 1;
                if !cat.is_relation(&rel.expr.relabel(&map, &sp)?)? {
                    bad += 1;
                }
            }
        }
    }
    lines.push(format!("relabeling: 100 relabelings, {checked} relation images, {bad} not relations"));
    failures += bad;

    let mut bad = 0;
    let (x, y) = (Marking::point("x"), Marking::point("y"));
    for sp in [space(1, 2)?, space(2, 0)?, space(2, 1)?, space(3, 0)?] {
        let pool = degree_monomials(&sp, 2)?;
        for _ in 0..25 {
            let e = random_degree_two(&sp, &pool, &mut rng);
            let xy = forget_pullback(&forget_pullback(&e, &y)?, &x)?;
            let yx = forget_pullback(&forget_pullback(&e, &x)?, &y)?;
            if xy.pruned() != yx.pruned() {
                bad += 1;
            }
        }
    }
    lines.push(format!("forgetful maps: 100 expressions, {bad} where the order of forgetting matters"));
    failures += bad;

    let mut bad = 0;
    for sp in [space(2, 2)?, space(3, 1)?] {
        let cat = catalog(&sp)?;
        let pool = degree_monomials(&sp, 2)?;
        for _ in 0..50 {
            let (e1, e2) = (random_degree_two(&sp, &pool, &mut rng), random_degree_two(&sp, &pool, &mut rng));
            let (s, t) = (rational(&mut rng), rational(&mut rng));
            let mut sum = e1.scaled(&s);
            sum.add_scaled(&e2, &t);
            let mut parts = cat.reduce(&e1)?.to_expr(&sp).scaled(&s);
            parts.add_scaled(&cat.reduce(&e2)?.to_expr(&sp), &t);
            if cat.reduce(&sum)?.to_expr(&sp) != parts {
                bad += 1;
            }
        }
    }
    lines.push(format!("reduction: 100 random combinations, {bad} where reduce is not linear"));
    failures += bad;

    Ok((failures == 0, lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffling_keeps_the_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sp = space(2, 1).unwrap();
        let g = Family::H { a: 0, side: sp.markings.clone() }.build(2, &sp.markings).unwrap();
        let mut d = Decorated::bare(g);
        d.add_psi(&HalfEdge::Edge(1, 0), 1);
        let m = d.canon();
        for _ in 0..20 {
            assert_eq!(shuffle(&d, &mut rng).canon(), m);
        }
    }

    #[test]
    fn unknown_check_fails() {
        assert!(!run(10).unwrap().pass);
    }
}
