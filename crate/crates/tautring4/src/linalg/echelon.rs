use crate::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type SparseVec = BTreeMap<usize, Q>;

/// Row echelon form built one row at a time. The leading column of a row is
/// its smallest column index, so callers control which columns get
/// eliminated first by how they number them.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseVec>,
}

fn axpy(v: &mut SparseVec, a: &Q, row: &SparseVec) {
    for (&c, x) in row {
        let entry = v.entry(c).or_insert_with(Q::zero);
        *entry -= a * x;
        if entry.is_zero() {
            v.remove(&c);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Removes every pivot column from `v` using the stored rows.
    pub fn reduce(&self, v: &mut SparseVec) {
        let mut from = 0usize;
        loop {
            let next = v.range(from..).map(|(&c, _)| c).find(|c| self.pivots.contains_key(c));
            let Some(c) = next else { break };
            let a = v[&c].clone();
            axpy(v, &a, &self.pivots[&c]);
            from = c + 1;
        }
    }

    /// Adds a row; returns false if it was already in the span.
    pub fn insert(&mut self, mut v: SparseVec) -> bool {
        self.reduce(&mut v);
        let Some((&lead, x)) = v.iter().next() else { return false };
        let inv = Q::one() / x;
        for y in v.values_mut() {
            *y *= &inv;
        }
        self.pivots.insert(lead, v);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn normal_form_is_independent_of_insertion_order() {
        let rows = vec![
            SparseVec::from([(0, q(1)), (2, q(1))]),
            SparseVec::from([(1, q(2)), (2, q(-1))]),
            SparseVec::from([(0, q(1)), (1, q(2))]),
        ];
        let mut a = Echelon::new();
        let mut b = Echelon::new();
        for r in &rows {
            a.insert(r.clone());
        }
        for r in rows.iter().rev() {
            b.insert(r.clone());
        }
        assert_eq!(a.rank(), 2);
        let v = SparseVec::from([(0, q(3)), (3, q(1))]);
        let (mut x, mut y) = (v.clone(), v);
        a.reduce(&mut x);
        b.reduce(&mut y);
        assert_eq!(x, y);
    }
}
