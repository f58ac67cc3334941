//! Exact rational scalars, vectors and dense matrices.
//!
//! Everything here is exact: [`Rat`] is an arbitrary-precision fraction kept in
//! lowest terms, and no operation ever rounds. Matrices are small (a handful
//! of rows), so a dense row-major layout is used throughout.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always normalized.
pub type Rat = BigRational;

/// Builds `num / den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`; rejects zero denominators and anything else.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// Formats a rational as `"p/q"`, or `"p"` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter storing a [`Rat`] as a `"p/q"` string.
pub mod serde_rat {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| D::Error::custom(format!("invalid rational '{s}'")))
    }
}

/// Serde adapter for `Vec<Rat>` as a list of `"p/q"` strings.
pub mod serde_rat_vec {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&fmt_rat(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).ok_or_else(|| D::Error::custom(format!("invalid rational '{s}'"))))
            .collect()
    }
}

/// Row vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct QVec(#[serde(with = "serde_rat_vec")] pub Vec<Rat>);

impl QVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        QVec(entries)
    }

    pub fn zeros(n: usize) -> Self {
        QVec(vec![Rat::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn dot(&self, other: &QVec) -> Result<Rat> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "dot of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> Rat {
        self.0.iter().map(|a| a * a).sum()
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &QMat) -> Result<QVec> {
        if self.len() != m.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} times {}x{} matrix",
                self.len(),
                m.rows,
                m.cols
            )));
        }
        let mut out = vec![Rat::zero(); m.cols];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = &m[(i, j)];
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        Ok(QVec(out))
    }
}

impl fmt::Display for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Dense row-major rational matrix; serialized as a list of rows of
/// `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn diag(entries: &[Rat]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        QMat::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_fracs(rows: &[&[(i64, i64)]]) -> Self {
        let rs: Vec<Vec<Rat>> = rows
            .iter()
            .map(|row| row.iter().map(|&(n, d)| rat(n, d)).collect())
            .collect();
        QMat::from_rows(rs).expect("rectangular literal")
    }

    /// Convenience constructor from integer literals.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rs: Vec<Vec<Rat>> = rows
            .iter()
            .map(|row| row.iter().map(|&n| int(n)).collect())
            .collect();
        QMat::from_rows(rs).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> Result<QMat> {
        mat_mul(self, other)
    }

    pub fn pow(&self, mut k: u64) -> Result<QMat> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = QMat::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = mat_mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = mat_mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> Rat {
        self.data
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

impl Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rat).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact matrix product.
pub fn mat_mul(a: &QMat, b: &QMat) -> Result<QMat> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = QMat::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = &a[(i, k)];
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let y = &b[(k, j)];
                if !y.is_zero() {
                    out[(i, j)] += x * y;
                }
            }
        }
    }
    Ok(out)
}

/// `m * m^T == I` exactly. Non-square matrices are never orthogonal.
pub fn is_orthogonal(m: &QMat) -> bool {
    m.is_square() && mat_mul(m, &m.transpose()).is_ok_and(|p| p.is_identity())
}

impl serde::Serialize for QMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_rat).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for QMat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| parse_rat(x).ok_or_else(|| D::Error::custom(format!("invalid rational '{x}'"))))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        QMat::from_rows(rows).map_err(D::Error::custom)
    }
}

/// Symmetric idempotent: `m == m^T` and `m * m == m`.
pub fn is_projection(m: &QMat) -> bool {
    m.is_square() && *m == m.transpose() && mat_mul(m, m).is_ok_and(|p| p == *m)
}

/// Block-diagonal sum `M1 ⊕ … ⊕ Mk` of square blocks.
pub fn block_sum(ms: &[QMat]) -> Result<QMat> {
    if ms.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    if let Some(m) = ms.iter().find(|m| !m.is_square()) {
        return Err(Error::Dimension(format!(
            "block of shape {}x{} is not square",
            m.rows, m.cols
        )));
    }
    let n: usize = ms.iter().map(QMat::rows).sum();
    let mut out = QMat::zeros(n, n);
    let mut off = 0;
    for m in ms {
        for i in 0..m.rows {
            for j in 0..m.cols {
                out[(off + i, off + j)] = m[(i, j)].clone();
            }
        }
        off += m.rows;
    }
    Ok(out)
}

/// Splits a `kn x kn` block-diagonal matrix into its `k` diagonal `n x n` blocks.
pub fn block_extract(m: &QMat, k: usize, n: usize) -> Result<Vec<QMat>> {
    if m.rows != k * n || m.cols != k * n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not {k} blocks of size {n}",
            m.rows, m.cols
        )));
    }
    for bi in 0..k {
        for bj in (0..k).filter(|&bj| bj != bi) {
            let nonzero = (0..n).any(|i| (0..n).any(|j| !m[(bi * n + i, bj * n + j)].is_zero()));
            if nonzero {
                return Err(Error::OffDiagonalBlock(bi, bj));
            }
        }
    }
    Ok((0..k)
        .map(|b| {
            let mut blk = QMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    blk[(i, j)] = m[(b * n + i, b * n + j)].clone();
                }
            }
            blk
        })
        .collect())
}

/// Checks that `pi` (indexed row-major by `(i, j)`) is a bijection on `{0..n}^2`.
pub fn check_entry_permutation(pi: &[(usize, usize)], n: usize) -> Result<()> {
    if pi.len() != n * n {
        return Err(Error::NotBijection);
    }
    let mut seen = vec![false; n * n];
    for &(i, j) in pi {
        if i >= n || j >= n || std::mem::replace(&mut seen[i * n + j], true) {
            return Err(Error::NotBijection);
        }
    }
    Ok(())
}

/// The transposition map `(i, j) ↦ (j, i)` in the row-major layout used by
/// [`permute_entries`].
pub fn transpose_permutation(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).map(move |j| (j, i))).collect()
}

/// `result[i, j] = m[pi(i, j)]`, where `pi[i * n + j]` holds `pi(i, j)`.
pub fn permute_entries(pi: &[(usize, usize)], m: &QMat) -> Result<QMat> {
    if !m.is_square() {
        return Err(Error::Dimension("entry permutation of a non-square matrix".into()));
    }
    let n = m.rows;
    check_entry_permutation(pi, n)?;
    let mut out = QMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[pi[i * n + j]].clone();
        }
    }
    Ok(out)
}
