use num_traits::{One, Zero};
use proptest::prelude::*;
use std::sync::OnceLock;
use tautring4::calculus::{forget_pullback, multiply};
use tautring4::expr::{degree_monomials, Decorated, Monomial, Space, TautExpr};
use tautring4::graph::{enumerate, StableGraph};
use tautring4::linalg::{fraction_free_echelon, RationalMatrix};
use tautring4::relations::catalog;
use tautring4::{Marking, Q};

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// Mostly zeros, so that rank deficiency is common.
fn entry() -> impl Strategy<Value = Q> {
    prop_oneof![3 => Just(Q::zero()), 2 => rational()]
}

fn matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(entry(), c), r).prop_map(|rows| RationalMatrix::from_dense(&rows))
    })
}

/// Textbook elimination on a dense copy.
fn dense_rank(m: &RationalMatrix) -> usize {
    let mut a: Vec<Vec<Q>> = (0..m.nrows).map(|r| (0..m.ncols).map(|c| m.get(r, c)).collect()).collect();
    let mut rank = 0;
    for c in 0..m.ncols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for k in 0..m.ncols {
                    let x = &a[rank][k] * &f;
                    a[r][k] -= x;
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_of_transpose(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank(), dense_rank(&m));
    }

    #[test]
    fn kernel_vectors_are_killed(m in matrix()) {
        let k = m.kernel();
        prop_assert_eq!(k.len(), m.ncols - m.rank());
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_back_substitutes(m in matrix(), seed in proptest::collection::vec(rational(), 6), b in proptest::collection::vec(rational(), 6)) {
        let x0: Vec<Q> = seed[..m.ncols].to_vec();
        let b0 = m.mul_vec(&x0);
        let x = m.solve(&b0).expect("consistent by construction");
        prop_assert_eq!(m.mul_vec(&x), b0);
        let b = b[..m.nrows].to_vec();
        match m.solve(&b) {
            Some(x) => prop_assert_eq!(m.mul_vec(&x), b),
            None => {
                let mut aug = m.clone();
                aug.ncols += 1;
                for (r, v) in b.iter().enumerate() {
                    aug.set(r, m.ncols, v.clone());
                }
                prop_assert!(aug.rank() > m.rank());
            }
        }
    }

    #[test]
    fn echelon_rows_are_primitive_integers(m in matrix()) {
        let ech = fraction_free_echelon(&m);
        prop_assert!(ech.pivot_cols.windows(2).all(|w| w[0] < w[1]));
        for (row, &c) in ech.rows.iter().zip(&ech.pivot_cols) {
            prop_assert_eq!(row.keys().next().copied(), Some(c));
            let g = row.values().fold(num_bigint::BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
            prop_assert!(g.is_one());
        }
    }
}

fn space(g: u32, labels: &[&str]) -> Space {
    Space::new(g, &tautring4::marking::markings(labels)).unwrap()
}

fn graphs_22() -> &'static (Space, Vec<StableGraph>) {
    static G: OnceLock<(Space, Vec<StableGraph>)> = OnceLock::new();
    G.get_or_init(|| {
        let sp = space(2, &["a", "b"]);
        let gs = (0..=2).flat_map(|c| enumerate(2, &sp.markings, c).unwrap()).map(|n| n.graph).collect();
        (sp, gs)
    })
}

/// A decorated graph of total degree at most two, built from choices.
fn decorate(graph: &StableGraph, picks: &[(bool, usize)]) -> Decorated {
    let mut d = Decorated::bare(graph.clone());
    let halves = graph.half_edges();
    for &(kappa, i) in picks.iter().take(2 - graph.codim()) {
        if kappa || halves.is_empty() {
            d.add_kappa(i % graph.n_vertices(), 1);
        } else {
            d.add_psi(&halves[i % halves.len()], 1);
        }
    }
    d
}

fn pool(sp: &Space, d: usize) -> Vec<Monomial> {
    degree_monomials(sp, d).unwrap()
}

fn combination(pool: &[Monomial], picks: &[(usize, Q)], sp: &Space) -> TautExpr {
    let mut e = TautExpr::zero(sp);
    for (i, c) in picks {
        e.add_term(pool[i % pool.len()].clone(), c.clone());
    }
    e
}

fn terms() -> impl Strategy<Value = Vec<(usize, Q)>> {
    proptest::collection::vec((0usize..1000, rational()), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_is_idempotent(gi in 0usize..1000, picks in proptest::collection::vec((any::<bool>(), 0usize..16), 2)) {
        let (_, gs) = graphs_22();
        let d = decorate(&gs[gi % gs.len()], &picks);
        let m = d.canon();
        prop_assert_eq!(m.decorated().canon(), m.clone());
        prop_assert_eq!(m.degree(), d.graph.codim() + picks.iter().take(2 - d.graph.codim()).count());
    }

    #[test]
    fn forgetting_is_functorial(t in terms()) {
        let sp = space(2, &["a"]);
        let e = combination(&pool(&sp, 2), &t, &sp);
        let (x, y) = (Marking::point("x"), Marking::point("y"));
        let xy = forget_pullback(&forget_pullback(&e, &y).unwrap(), &x).unwrap();
        let yx = forget_pullback(&forget_pullback(&e, &x).unwrap(), &y).unwrap();
        prop_assert_eq!(xy.pruned(), yx.pruned());
    }

    #[test]
    fn product_is_bilinear(t1 in terms(), t2 in terms(), t3 in terms(), s in rational()) {
        let sp = space(2, &["a"]);
        let p = pool(&sp, 1);
        let (x, y, z) = (combination(&p, &t1, &sp), combination(&p, &t2, &sp), combination(&p, &t3, &sp));
        let mut lhs_in = x.clone();
        lhs_in.add_scaled(&y, &s);
        let lhs = multiply(&lhs_in, &z).unwrap();
        let mut rhs = multiply(&x, &z).unwrap();
        rhs.add_scaled(&multiply(&y, &z).unwrap(), &s);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(multiply(&x, &z).unwrap(), multiply(&z, &x).unwrap());
    }

    #[test]
    fn reduction_is_linear(t1 in terms(), t2 in terms(), s in rational()) {
        let sp = space(2, &["a", "b"]);
        let cat = catalog(&sp).unwrap();
        let p = pool(&sp, 2);
        let (x, y) = (combination(&p, &t1, &sp), combination(&p, &t2, &sp));
        let mut sum = x.clone();
        sum.add_scaled(&y, &s);
        let mut parts = cat.reduce(&x).unwrap().to_expr(&sp);
        parts.add_scaled(&cat.reduce(&y).unwrap().to_expr(&sp), &s);
        prop_assert_eq!(cat.reduce(&sum).unwrap().to_expr(&sp), parts);
    }

    #[test]
    fn relations_reduce_to_zero(i in 0usize..1000, s in rational()) {
        let sp = space(2, &["a", "b"]);
        let cat = catalog(&sp).unwrap();
        let r = &cat.relations[i % cat.relations.len()];
        prop_assert!(cat.reduce(&r.expr.scaled(&s)).unwrap().is_zero());
    }
}
