//! Sparse multivariate polynomials over ℚ and invariant-polynomial spaces.
//!
//! Variables are plain `u32` indices. For an `n x n` matrix of unknowns the
//! entry `x[i][j]` is variable `i * n + j` (see [`matrix_var`]).

mod invariant;
mod linalg;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratmat::{fmt_rat, QMat, Rat};

pub use invariant::{clear_invariant_cache, homogeneous_invariants, invariant_space, PolyBasis};
pub use linalg::{kernel, SpanEchelon};

pub type Var = u32;

/// Variable index of entry `(i, j)` of an `n x n` matrix of unknowns.
pub fn matrix_var(n: usize, i: usize, j: usize) -> Var {
    (i * n + j) as Var
}

/// Power product of variables; zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds from `(var, exponent)` pairs in any order, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponents(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by_key(&v, |&(w, _)| w)
            .map_or(0, |i| self.0[i].1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)))
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        let mut acc = Rat::one();
        for &(v, e) in &self.0 {
            let x = point.get(v as usize).ok_or_else(|| {
                Error::Dimension(format!("variable {v} outside a point of length {}", point.len()))
            })?;
            acc *= num_traits::pow(x.clone(), e as usize);
        }
        Ok(acc)
    }
}

/// Multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Monomial::var(v), Rat::one())
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one())
    }

    /// The value when the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    pub fn shift_vars(&self, offset: Var) -> Poly {
        self.map_vars(|v| v + offset)
    }

    /// Replaces every variable `v` by `f(v)` and expands.
    pub fn substitute(&self, f: impl Fn(Var) -> Poly) -> Poly {
        let mut cache: BTreeMap<(Var, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for &(v, e) in &m.0 {
                let pw = cache
                    .entry((v, e))
                    .or_insert_with(|| f(v).pow(e))
                    .clone();
                t = &t * &pw;
            }
            out = &out + &t;
        }
        out
    }

    /// Evaluates at `point`, where variable `v` takes `point[v]`.
    pub fn eval_at(&self, point: &[Rat]) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            acc += c * m.eval(point)?;
        }
        Ok(acc)
    }

    /// Rescales so the coefficients are coprime integers with a positive
    /// coefficient on the largest monomial.
    pub fn primitive(&self) -> Poly {
        use num_integer::Integer;
        let Some((_, lead)) = self.terms.iter().next_back() else {
            return Poly::zero();
        };
        let den_lcm = self
            .terms
            .values()
            .fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num_gcd = self.terms.values().fold(num_bigint::BigInt::zero(), |acc, c| {
            acc.gcd(&(c.numer() * (&den_lcm / c.denom())))
        });
        let mut factor = Rat::new(den_lcm, num_gcd);
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn display_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .map(|&(v, e)| if e == 1 { name(v) } else { format!("{}^{e}", name(v)) })
                .collect();
            if m.is_one() {
                s.push_str(&fmt_rat(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_rat(&a));
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|v| format!("x{v}")))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// Default display name for entry `v` of an `n x n` matrix of unknowns.
pub fn matrix_var_name(n: usize, v: Var) -> String {
    let (i, j) = (v as usize / n + 1, v as usize % n + 1);
    if n < 10 {
        format!("x{i}{j}")
    } else {
        format!("x{i}_{j}")
    }
}

/// Value of `p` at the point whose coordinates are the entries of `m`.
pub fn eval(p: &Poly, m: &QMat) -> Result<Rat> {
    if !m.is_square() {
        return Err(Error::Dimension("evaluation point must be a square matrix".into()));
    }
    if let Some(&v) = p.vars().iter().next_back() {
        if v as usize >= m.rows() * m.cols() {
            return Err(Error::Dimension(format!(
                "variable {v} outside a {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
    }
    p.eval_at(m.entries())
}

/// The linear forms `(gX)[i][j] = Σ_k g[i][k] x[k][j]`, indexed by `i * n + j`.
pub(crate) fn left_mul_forms(g: &QMat) -> Vec<Poly> {
    let n = g.rows();
    let mut forms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut p = Poly::zero();
            for k in 0..n {
                p.add_term(Monomial::var(matrix_var(n, k, j)), g[(i, k)].clone());
            }
            forms.push(p);
        }
    }
    forms
}

/// The polynomial `X ↦ p(gX)`.
pub fn subst_left_mul(p: &Poly, g: &QMat) -> Result<Poly> {
    if !g.is_square() {
        return Err(Error::Dimension("left multiplier must be square".into()));
    }
    let n = g.rows();
    if let Some(&v) = p.vars().iter().next_back() {
        if v as usize >= n * n {
            return Err(Error::Dimension(format!("variable {v} outside a {n}x{n} matrix")));
        }
    }
    let forms = left_mul_forms(g);
    Ok(p.substitute(|v| forms[v as usize].clone()))
}
