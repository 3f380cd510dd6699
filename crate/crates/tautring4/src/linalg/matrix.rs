use super::echelon::SparseVec;
use crate::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A sparse matrix with rational entries, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SparseVec>,
}

/// Integer row echelon form: each row is primitive and has its leading entry
/// in column `pivot_cols[i]`.
#[derive(Clone, Debug)]
pub struct IntEchelon {
    pub ncols: usize,
    pub rows: Vec<BTreeMap<usize, BigInt>>,
    pub pivot_cols: Vec<usize>,
}

fn primitive(row: &SparseVec) -> BTreeMap<usize, BigInt> {
    let lcm = row.values().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut out: BTreeMap<usize, BigInt> =
        row.iter().map(|(&c, x)| (c, x.numer() * (&lcm / x.denom()))).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut BTreeMap<usize, BigInt>) {
    let g = row.values().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.values_mut() {
            *x /= &g;
        }
    }
}

/// Fraction-free Gaussian elimination. Every reduced row is divided by the
/// gcd of its entries; among candidate pivots the entry with the fewest bits
/// wins. No rational arithmetic happens here.
pub fn fraction_free_echelon(m: &RationalMatrix) -> IntEchelon {
    let mut pending: Vec<BTreeMap<usize, BigInt>> =
        m.rows.iter().filter(|r| !r.is_empty()).map(primitive).collect();
    let mut rows = Vec::new();
    let mut pivot_cols = Vec::new();
    loop {
        pending.retain(|r| !r.is_empty());
        let Some(col) = pending.iter().filter_map(|r| r.keys().next().copied()).min() else { break };
        let (best, _) = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r.keys().next() == Some(&col))
            .min_by_key(|(i, r)| (r[&col].bits(), *i))
            .unwrap();
        let piv = pending.swap_remove(best);
        let p = piv[&col].clone();
        for r in pending.iter_mut() {
            let Some(a) = r.get(&col).cloned() else { continue };
            let g = p.gcd(&a);
            let (pp, aa) = (&p / &g, &a / &g);
            for x in r.values_mut() {
                *x *= &pp;
            }
            for (&c, y) in &piv {
                let e = r.entry(c).or_insert_with(BigInt::zero);
                *e -= &aa * y;
            }
            r.retain(|_, x| !x.is_zero());
            make_primitive(r);
        }
        rows.push(piv);
        pivot_cols.push(col);
    }
    IntEchelon { ncols: m.ncols, rows, pivot_cols }
}

impl IntEchelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduced row echelon form over Q (leading ones, zeros above and below).
    pub fn rref(&self) -> Vec<SparseVec> {
        let mut rows: Vec<SparseVec> = self
            .rows
            .iter()
            .zip(&self.pivot_cols)
            .map(|(r, c)| {
                let lead = Q::from_integer(r[c].clone());
                r.iter().map(|(&k, x)| (k, Q::from_integer(x.clone()) / &lead)).collect()
            })
            .collect();
        for i in (0..rows.len()).rev() {
            let c = self.pivot_cols[i];
            let pivot_row = rows[i].clone();
            for (j, row) in rows.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                if let Some(a) = row.get(&c).cloned() {
                    for (&k, x) in &pivot_row {
                        let e = row.entry(k).or_insert_with(Q::zero);
                        *e -= &a * x;
                        if e.is_zero() {
                            row.remove(&k);
                        }
                    }
                }
            }
        }
        rows
    }
}

impl RationalMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RationalMatrix { nrows, ncols, rows: vec![SparseVec::new(); nrows] }
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseVec>) -> Self {
        RationalMatrix { nrows: rows.len(), ncols, rows }
    }

    pub fn from_dense(data: &[Vec<Q>]) -> Self {
        let ncols = data.first().map_or(0, |r| r.len());
        let rows = data
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(c, x)| (c, x.clone())).collect())
            .collect();
        Self::from_rows(ncols, rows)
    }

    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, Q)]) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for (r, c, x) in entries {
            let e = m.rows[*r].entry(*c).or_insert_with(Q::zero);
            *e += x;
            if e.is_zero() {
                m.rows[*r].remove(c);
            }
        }
        m
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Q)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, x)| (r, c, x.clone())))
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.rows[r].get(&c).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, x: Q) {
        if x.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, x);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, x) in row {
                t.rows[c].insert(r, x.clone());
            }
        }
        t
    }

    /// Submatrix on the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let data = rows
            .iter()
            .map(|&r| self.rows[r].iter().filter_map(|(c, x)| pos.get(c).map(|&i| (i, x.clone()))).collect())
            .collect();
        Self::from_rows(cols.len(), data)
    }

    pub fn rank(&self) -> usize {
        fraction_free_echelon(self).rank()
    }

    /// Basis of {x : M x = 0}.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let ech = fraction_free_echelon(self);
        let rref = ech.rref();
        let pivots: BTreeMap<usize, usize> = ech.pivot_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        (0..self.ncols)
            .filter(|c| !pivots.contains_key(c))
            .map(|free| {
                let mut v = vec![Q::zero(); self.ncols];
                v[free] = Q::one();
                for (&pc, &i) in &pivots {
                    if let Some(x) = rref[i].get(&free) {
                        v[pc] = -x.clone();
                    }
                }
                v
            })
            .collect()
    }

    /// Some x with M x = b, if one exists.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.nrows);
        let mut aug = self.clone();
        aug.ncols += 1;
        for (r, x) in b.iter().enumerate() {
            aug.set(r, self.ncols, x.clone());
        }
        let ech = fraction_free_echelon(&aug);
        if ech.pivot_cols.contains(&self.ncols) {
            return None;
        }
        let rref = ech.rref();
        let mut x = vec![Q::zero(); self.ncols];
        for (i, &c) in ech.pivot_cols.iter().enumerate() {
            x[c] = rref[i].get(&self.ncols).cloned().unwrap_or_else(Q::zero);
        }
        Some(x)
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        self.rows.iter().map(|row| row.iter().map(|(&c, a)| a * &x[c]).sum()).collect()
    }

    pub fn is_integer(&self) -> bool {
        self.rows.iter().all(|r| r.values().all(|x| x.is_integer()))
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn rank_kernel_solve() {
        let m = RationalMatrix::from_dense(&[vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(1), q(0), q(1)]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
        let b = vec![q(6), q(12), q(2)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        assert!(m.solve(&[q(1), q(0), q(0)]).is_none());
    }
}
