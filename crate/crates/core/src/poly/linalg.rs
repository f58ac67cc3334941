//! Exact linear algebra on coefficient vectors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Poly};
use crate::ratmat::{QVec, Rat};

fn content_reduce(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Integer rows with the same row space as `rows`.
fn integer_rows(rows: &[QVec]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| {
            let l = r.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let mut out: Vec<BigInt> = r.0.iter().map(|c| c.numer() * (&l / c.denom())).collect();
            content_reduce(&mut out);
            out
        })
        .collect()
}

/// Basis of the rational nullspace `{v : row · v = 0 for every row}`.
///
/// Elimination runs on integer rows (fraction-free, content-reduced after
/// every step). Each basis vector has a single 1 in a free column and zeros in
/// the other free columns, so the output is canonical for a given row space.
/// With no rows there is no column count to infer and the result is empty.
pub fn kernel(rows: &[QVec]) -> Vec<QVec> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    kernel_with_width(rows, first.len())
}

pub(crate) fn kernel_with_width(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    assert!(rows.iter().all(|r| r.len() == ncols), "rows of unequal length");
    let mut m = integer_rows(rows);
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        // Prefer the pivot of smallest magnitude to limit growth.
        let Some(p) = (r..m.len())
            .filter(|&i| !m[i][c].is_zero())
            .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()))
        else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(rest.iter_mut()) {
            if row[c].is_zero() {
                continue;
            }
            let g = pivot_row[c].gcd(&row[c]);
            let a = &pivot_row[c] / &g;
            let b = &row[c] / &g;
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                *x = &a * &*x - &b * y;
            }
            content_reduce(row);
        }
        pivots.push(c);
        r += 1;
    }
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    (0..ncols)
        .filter(|c| !pivot_set.contains(c))
        .map(|f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (k, &p) in pivots.iter().enumerate() {
                if !m[k][f].is_zero() {
                    v[p] = -Rat::new(m[k][f].clone(), m[k][p].clone());
                }
            }
            QVec(v)
        })
        .collect()
}

/// Incremental echelon form of a span of polynomials, keyed by leading
/// (largest) monomial. Used for span-membership and rank tests.
#[derive(Clone, Debug, Default)]
pub struct SpanEchelon {
    rows: BTreeMap<Monomial, Poly>,
}

impl SpanEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_polys<'a>(polys: impl IntoIterator<Item = &'a Poly>) -> Self {
        let mut e = Self::new();
        for p in polys {
            e.insert(p);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `p` after eliminating every pivot monomial.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut p = p.clone();
        let mut bound: Option<Monomial> = None;
        loop {
            let hit = p
                .terms()
                .rev()
                .filter(|(m, _)| bound.as_ref().is_none_or(|b| *m < b))
                .find(|(m, _)| self.rows.contains_key(*m))
                .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = hit else {
                return p;
            };
            p = &p - &self.rows[&m].scale(&c);
            bound = Some(m);
        }
    }

    /// Adds `p` to the span; returns false when it was already contained.
    pub fn insert(&mut self, p: &Poly) -> bool {
        let r = self.reduce(p);
        let Some((lead, c)) = r.terms().next_back().map(|(m, c)| (m.clone(), c.clone())) else {
            return false;
        };
        let r = r.scale(&c.recip());
        // keep rows fully reduced against the new pivot
        for row in self.rows.values_mut() {
            let k = row.coeff(&lead);
            if !k.is_zero() {
                *row = &*row - &r.scale(&k);
            }
        }
        self.rows.insert(lead, r);
        true
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.reduce(p).is_zero()
    }
}
