use num_traits::Zero;
use std::collections::BTreeMap;
use tautring4::expr::{format_q, TautExpr};
use tautring4::relations::natives;
use tautring4::verify::derive::compare_with_kernel;
use tautring4::Q;

#[test]
fn every_relation_in_use_lies_in_the_pullback_kernel() {
    for n in natives().unwrap() {
        let c = compare_with_kernel(&n.id, &n.expr).unwrap();
        if c.given.is_zero() {
            // already implied by relations from other genera
            assert!(matches!(n.expr.space.genus, 0 | 1), "{}", n.id);
            continue;
        }
        assert!(c.kernel_dim > 0, "{}: empty kernel", n.id);
        let diffs: Vec<String> = c
            .differences()
            .iter()
            .map(|(m, a, b)| format!("{} {} vs {}", m.name(), format_q(a), format_q(b)))
            .collect();
        assert!(c.derived.is_some() && diffs.is_empty(), "{}: {diffs:?}", n.id);
    }
}

#[test]
fn printed_and_used_forms_differ_exactly_when_corrected() {
    for n in natives().unwrap() {
        match &n.printed {
            Some(p) => assert_eq!(p == &n.expr, n.corrections.is_empty(), "{}", n.id),
            None => assert!(!n.corrections.is_empty(), "{}", n.id),
        }
        for c in &n.corrections {
            assert!(!c.reason().is_empty());
        }
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Coefficient of kappa_1 in the pushforward along M(g,1) -> M(g) of the
/// codimension-zero part, using kappa_a = pi^*kappa_a + psi^a and
/// pi_*(psi^(m+1)) = kappa_m, kappa_0 = 2g - 2.
fn kappa1_after_pushforward(e: &TautExpr) -> Q {
    let g = e.space.genus as i64;
    let mut total = Q::zero();
    for (m, c) in &e.terms {
        if m.codim() != 0 {
            continue;
        }
        let d = m.decorated();
        let kappas = &d.kappa[0];
        let k: u32 = d.leg_psi.values().map(|&x| x as u32).sum();
        // each kappa factor either stays as pi^* or turns into a psi power
        let mut poly: BTreeMap<(Vec<u8>, u32), Q> = BTreeMap::new();
        poly.insert((vec![], k), q(1));
        for &a in kappas {
            let mut next = BTreeMap::new();
            for ((ks, p), x) in poly {
                let mut kept = ks.clone();
                kept.push(a);
                kept.sort();
                *next.entry((kept, p)).or_insert_with(Q::zero) += x.clone();
                *next.entry((ks, p + a as u32)).or_insert_with(Q::zero) += x;
            }
            poly = next;
        }
        for ((ks, p), x) in poly {
            if p == 0 {
                continue;
            }
            // pi_*(psi^p) = kappa_{p-1}; keep the total kappa_1 part
            let mut all = ks.clone();
            let const_factor = if p == 1 { q(2 * g - 2) } else { q(1) };
            if p > 1 {
                all.push((p - 1) as u8);
            }
            if all == vec![1] {
                total += c * x * const_factor;
            }
        }
    }
    total
}

#[test]
fn genus_three_one_point_signs_agree_with_pushforward() {
    let ns = natives().unwrap();
    let rels: Vec<_> = ns.iter().filter(|n| n.id.starts_with("g3n1")).collect();
    assert_eq!(rels.len(), 3);
    for n in rels {
        assert!(kappa1_after_pushforward(&n.expr).is_zero(), "{}", n.id);
        let printed = n.printed.as_ref().unwrap();
        assert!(!kappa1_after_pushforward(printed).is_zero(), "{}", n.id);
    }
}

#[test]
fn pushforward_oracle_on_small_cases() {
    use tautring4::class::make_class;
    use tautring4::expr::Space;
    use tautring4::marking::Marking;
    let sp = Space::new(3, &[Marking::point("1")]).unwrap();
    let at = |d: &str| kappa1_after_pushforward(&make_class(&sp, d).unwrap());
    assert_eq!(at("psi_1^2"), q(1));
    assert_eq!(at("kappa1*psi_1"), q(5));
    assert_eq!(at("kappa1^2"), q(9));
    assert_eq!(at("kappa2"), q(1));
}
