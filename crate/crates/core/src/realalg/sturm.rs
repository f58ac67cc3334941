//! Univariate polynomials and Sturm-sequence real root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::ratmat::{fmt_rat, Rat};

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniPoly {
    #[serde(with = "crate::ratmat::serde_rat_vec")]
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    /// `t - r`.
    pub fn linear_root(r: Rat) -> Self {
        UniPoly::new(vec![-r, Rat::one()])
    }

    /// Reads a polynomial in the single variable `v`; `None` if another
    /// variable occurs.
    pub fn from_poly(p: &Poly, v: Var) -> Option<Self> {
        let mut coeffs = vec![Rat::zero(); p.total_degree() as usize + 1];
        for (m, c) in p.terms() {
            match m.exponents() {
                [] => coeffs[0] += c,
                [(w, k)] if *w == v => coeffs[*k as usize] += c,
                _ => return None,
            }
        }
        Some(UniPoly::new(coeffs))
    }

    pub fn to_poly(&self, v: Var) -> Poly {
        let t = Poly::var(v);
        let mut acc = Poly::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc = &acc + &t.pow(k as u32).scale(c);
        }
        acc
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = &r[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k - dd + j] -= &c * dc;
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => UniPoly::new(self.coeffs.iter().map(|c| c / l).collect()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Same real roots, each simple.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    fn neg(&self) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Power-of-two bound `B` with every real root in `(-B, B)`.
    pub fn root_bound(&self) -> Rat {
        let Some(lead) = self.leading() else {
            return Rat::one();
        };
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(Rat::zero(), |a, b| if b > a { b } else { a });
        let cauchy = Rat::one() + m;
        let mut b = Rat::one();
        while b <= cauchy {
            b *= Rat::from_integer(BigInt::from(2));
        }
        b
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, a.is_one()) {
                (0, _) => write!(f, "{}", fmt_rat(&a))?,
                (_, true) => {}
                _ => write!(f, "{}*", fmt_rat(&a))?,
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Sturm chain `p, p', -rem(p, p'), …`.
pub fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1.neg();
        if r.is_zero() {
            return seq;
        }
        seq.push(r);
    }
}

fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign changes of the chain at `x`; `None` means `+∞`.
fn changes_at(seq: &[UniPoly], x: Option<&Rat>) -> usize {
    match x {
        Some(x) => count_changes(seq.iter().map(|p| sign(&p.eval(x)))),
        None => count_changes(seq.iter().map(|p| p.leading().map_or(0, sign))),
    }
}

/// Sign changes at `-∞`.
fn changes_at_neg_inf(seq: &[UniPoly]) -> usize {
    count_changes(seq.iter().map(|p| {
        let s = p.leading().map_or(0, sign);
        if p.degree().unwrap_or(0) % 2 == 1 {
            -s
        } else {
            s
        }
    }))
}

/// Number of distinct real roots of a square-free `p` in `(a, b]`.
fn roots_in(seq: &[UniPoly], a: &Rat, b: &Rat) -> usize {
    changes_at(seq, Some(a)) - changes_at(seq, Some(b))
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &UniPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let seq = sturm_sequence(&p.squarefree());
    Ok(changes_at_neg_inf(&seq) - changes_at(&seq, None))
}

fn half(a: &Rat, b: &Rat) -> Rat {
    (a + b) / Rat::from_integer(BigInt::from(2))
}

/// Disjoint isolating intervals, one per distinct real root, in increasing
/// order, each of width at most 1. Endpoints are dyadic; a root found
/// exactly gets a point interval.
pub fn sturm_isolate(p: &UniPoly) -> Result<Vec<Interval>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sf = p.squarefree();
    if sf.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(&sf);
    let b = sf.root_bound();
    let mut out = Vec::new();
    // Work items (lo, hi) with lo, hi not roots; roots counted in (lo, hi].
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = roots_in(&seq, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine_root(&sf, &Interval::new(lo, hi), &Rat::one()));
            continue;
        }
        let mid = half(&lo, &hi);
        if sf.eval(&mid).is_zero() {
            out.push(Interval::point(mid.clone()));
            // step away from the exact root until no other root is skipped
            let mut d = (&hi - &lo) / Rat::from_integer(BigInt::from(4));
            loop {
                let l = &mid - &d;
                let r = &mid + &d;
                if !sf.eval(&l).is_zero()
                    && !sf.eval(&r).is_zero()
                    && roots_in(&seq, &l, &r) == 1
                {
                    stack.push((r, hi));
                    stack.push((lo, l));
                    break;
                }
                d /= Rat::from_integer(BigInt::from(2));
            }
        } else {
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// Shrinks an isolating interval of a root of `p` to width at most `width`.
pub fn refine_root(p: &UniPoly, iv: &Interval, width: &Rat) -> Interval {
    let sf = p.squarefree();
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    if sf.eval(&lo).is_zero() {
        return Interval::point(lo);
    }
    if sf.eval(&hi).is_zero() {
        return Interval::point(hi);
    }
    let slo = sign(&sf.eval(&lo));
    while &hi - &lo > *width {
        let mid = half(&lo, &hi);
        let s = sign(&sf.eval(&mid));
        if s == 0 {
            return Interval::point(mid);
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Interval::new(lo, hi)
}

/// True iff every real root of `p` is at most `c`.
pub fn max_real_root_leq(p: &UniPoly, c: &Rat) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let seq = sturm_sequence(&p.squarefree());
    Ok(changes_at(&seq, Some(c)) == changes_at(&seq, None))
}
