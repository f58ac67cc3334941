//! Binary truncations of an irrational, the set
//! `L(α) = { n : |α[1+2ℓ(n)] − q/n| < 1/n² for some q }` with `ℓ(n) = ⌊log₂ n⌋`,
//! continued-fraction candidates for it, and the cosine check along it.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratmat::{fmt_rat, Rat};
use crate::realalg::Interval;

/// Largest refinement request before giving up.
pub const MAX_BITS: u32 = 1 << 14;

/// A real number given by enclosures of any requested width.
#[derive(Clone)]
pub struct CertifiedReal {
    pub description: String,
    refine: Arc<dyn Fn(u32) -> Interval + Send + Sync>,
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CertifiedReal({})", self.description)
    }
}

impl CertifiedReal {
    /// `refine(bits)` must return an interval of width at most `2^-bits`
    /// containing the value.
    pub fn new(
        description: impl Into<String>,
        refine: impl Fn(u32) -> Interval + Send + Sync + 'static,
    ) -> Self {
        CertifiedReal {
            description: description.into(),
            refine: Arc::new(refine),
        }
    }

    pub fn refine(&self, bits: u32) -> Interval {
        (self.refine)(bits)
    }

    /// `(a + √d) / b` via integer square roots.
    pub fn quadratic(d: u64, a: i64, b: i64) -> Self {
        assert!(b > 0, "denominator must be positive");
        CertifiedReal::new(format!("({a} + sqrt({d}))/{b}"), move |bits| {
            let r: BigUint = (BigUint::from(d) << (2 * bits as usize)).sqrt();
            let scale = BigInt::one() << bits;
            let lo = Rat::new(BigInt::from(r), scale.clone());
            let hi = &lo + Rat::new(BigInt::one(), scale);
            let shift = |x: Rat| (x + Rat::from_integer(a.into())) / Rat::from_integer(b.into());
            Interval::new(shift(lo), shift(hi))
        })
    }

    pub fn sqrt2_minus_1() -> Self {
        CertifiedReal {
            description: "sqrt(2) - 1".into(),
            ..CertifiedReal::quadratic(2, -1, 1)
        }
    }

    /// Fractional part of the golden ratio.
    pub fn golden_fraction() -> Self {
        CertifiedReal {
            description: "(sqrt(5) - 1)/2".into(),
            ..CertifiedReal::quadratic(5, -1, 2)
        }
    }

    pub fn rational(x: Rat) -> Self {
        CertifiedReal::new(fmt_rat(&x), move |_| Interval::point(x.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaMember {
    pub n: u64,
    pub q: u64,
    #[serde(with = "crate::ratmat::serde_rat")]
    pub gap: Rat,
}

fn floor(x: &Rat) -> BigInt {
    x.numer().div_floor(x.denom())
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

fn ceil_log2(n: u64) -> u32 {
    64 - n.saturating_sub(1).leading_zeros()
}

/// `⌊α·2^k⌋ / 2^k`, the first `k` binary digits of `α`.
pub fn binary_truncation(alpha: &CertifiedReal, k: u32) -> Result<Rat> {
    let scale = Rat::from_integer(pow2(k));
    let mut bits = k + 16;
    while bits <= MAX_BITS {
        let iv = alpha.refine(bits);
        let a = floor(&(&iv.lo * &scale));
        if a == floor(&(&iv.hi * &scale)) {
            return Ok(Rat::new(a, pow2(k)));
        }
        bits *= 2;
    }
    Err(Error::Precision(format!(
        "{} too close to a dyadic of level {k}",
        alpha.description
    )))
}

/// `⌊log₂ n⌋`.
pub fn ell(n: u64) -> u32 {
    63 - n.leading_zeros()
}

pub fn l_alpha_member(alpha: &CertifiedReal, n: u64) -> Result<Option<AlphaMember>> {
    assert!(n >= 1, "n must be positive");
    let t = binary_truncation(alpha, 1 + 2 * ell(n))?;
    let nr = Rat::from_integer(n.into());
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let q = floor(&(&t * &nr + half)).clamp(BigInt::zero(), BigInt::from(n));
    let gap = (&t - Rat::new(q.clone(), n.into())).abs();
    if gap < Rat::new(BigInt::one(), BigInt::from(n) * BigInt::from(n)) {
        Ok(Some(AlphaMember {
            n,
            q: q.to_u64().expect("q fits"),
            gap,
        }))
    } else {
        Ok(None)
    }
}

/// Convergents `q/n` of `α ∈ (0, 1)` with `n ≤ n_max`, in order.
pub fn hurwitz_candidates(alpha: &CertifiedReal, n_max: u64) -> Result<Vec<(u64, u64)>> {
    let mut bits = 64;
    while bits <= MAX_BITS {
        if let Some(v) = convergents_within(alpha.refine(bits), n_max)? {
            return Ok(v);
        }
        bits *= 2;
    }
    Err(Error::Precision(format!(
        "continued fraction of {} not determined",
        alpha.description
    )))
}

/// `None` when the enclosure is too wide to fix the next partial quotient.
fn convergents_within(iv: Interval, n_max: u64) -> Result<Option<Vec<(u64, u64)>>> {
    if iv.lo.is_negative() {
        return Err(Error::Precision("value must be nonnegative".into()));
    }
    let (mut lo, mut hi) = (iv.lo, iv.hi);
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    loop {
        let a = floor(&lo);
        if a != floor(&hi) {
            return Ok(None);
        }
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        if q > BigInt::from(n_max) {
            return Ok(Some(out));
        }
        let (Some(pu), Some(qu)) = (p.to_u64(), q.to_u64()) else {
            return Err(Error::Precision("convergent numerator overflows".into()));
        };
        out.push((pu, qu));
        let ai = Rat::from_integer(a);
        let (fl, fh) = (&lo - &ai, &hi - &ai);
        if fl.is_zero() {
            // exact rational, or not yet separated from one
            return Ok(fh.is_zero().then_some(out));
        }
        (lo, hi) = (fh.recip(), fl.recip());
        (p2, q2, p1, q1) = (p1, q1, p, q);
    }
}

/// `arctan(1/m)` by its alternating series.
fn arctan_inv(m: u64, bits: u32) -> Interval {
    let m = Rat::from_integer(m.into());
    let m2 = &m * &m;
    let eps = Rat::new(BigInt::one(), pow2(bits + 8));
    let mut pw = m.recip();
    let mut sum = Rat::zero();
    let mut k: i64 = 0;
    loop {
        let term = &pw / Rat::from_integer((2 * k + 1).into());
        if term < eps {
            let next = if k % 2 == 0 { &sum + &term } else { &sum - &term };
            let (lo, hi) = if sum < next { (sum, next) } else { (next, sum) };
            return Interval::new(lo, hi);
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pw /= &m2;
        k += 1;
    }
}

/// `π = 16 arctan(1/5) − 4 arctan(1/239)`.
pub fn pi_interval(bits: u32) -> Interval {
    let a = arctan_inv(5, bits + 4).scale(&Rat::from_integer(16.into()));
    let b = arctan_inv(239, bits + 4).scale(&Rat::from_integer((-4).into()));
    a.add(&b).round_out(bits + 4)
}

/// Enclosure of `cos x` for `0 ≤ x ≤ 4`, clipped to `[-1, 1]`.
fn cos_point(x: &Rat, bits: u32) -> Interval {
    let x2 = x * x;
    let eps = Rat::new(BigInt::one(), pow2(bits + 4));
    let mut term = Rat::one();
    let mut sum = Rat::zero();
    let mut k: i64 = 0;
    loop {
        sum += &term;
        term = -term * &x2 / Rat::from_integer(((2 * k + 1) * (2 * k + 2)).into());
        k += 1;
        // for x ≤ 4 the terms decrease once 2k > 4, so the next one bounds the tail
        if k > 3 && term.abs() < eps {
            let r = term.abs();
            let one = Rat::one();
            let lo = (&sum - &r).max(-one.clone());
            let hi = (&sum + &r).min(one);
            return Interval::new(lo, hi).round_out(bits + 4);
        }
    }
}

fn exact_cos_turn(t: &Rat) -> Option<Rat> {
    if t.is_zero() {
        Some(Rat::one())
    } else if *t == Rat::new(1.into(), 4.into()) {
        Some(Rat::zero())
    } else if *t == Rat::new(1.into(), 2.into()) {
        Some(-Rat::one())
    } else {
        None
    }
}

/// Enclosure of `cos 2πt` over turns `t ∈ [tl, th] ⊆ [0, 1/2]`, where the
/// cosine decreases.
fn cos_turns(tl: &Rat, th: &Rat, bits: u32) -> Interval {
    let pi = pi_interval(bits + 8);
    let two = Rat::from_integer(2.into());
    let lo = exact_cos_turn(th).unwrap_or_else(|| {
        let x = &two * &pi.hi * th;
        if x > pi.lo {
            -Rat::one()
        } else {
            cos_point(&x, bits).lo
        }
    });
    let hi = exact_cos_turn(tl).unwrap_or_else(|| cos_point(&(&two * &pi.lo * tl), bits).hi);
    Interval::new(lo, hi)
}

/// Reduces a turn count to `[0, 1/2]` without changing its cosine.
fn fold_turn(t: &Rat) -> Rat {
    let f = t - Rat::from_integer(floor(t));
    let half = Rat::new(1.into(), 2.into());
    if f > half {
        Rat::one() - f
    } else {
        f
    }
}

/// Whether `cos(2π n α) ≥ cos(3π / n)`.
pub fn limit_check(alpha: &CertifiedReal, m: &AlphaMember) -> Result<bool> {
    let n = Rat::from_integer(m.n.into());
    let rhs_turn = fold_turn(&Rat::new(3.into(), (2 * m.n).into()));
    let half = Rat::new(1.into(), 2.into());
    let mut bits = 64;
    while bits <= MAX_BITS {
        let iv = alpha.refine(bits + ceil_log2(m.n) + 2);
        let (l, h) = (&iv.lo * &n, &iv.hi * &n);
        let r = Rat::from_integer(floor(&(&l + &half)));
        let (l, h) = (l - &r, h - &r);
        let (tl, th) = if l.is_negative() && h.is_positive() {
            (Rat::zero(), l.abs().max(h))
        } else if h.is_positive() || h.is_zero() {
            (l, h)
        } else {
            (h.abs(), l.abs())
        };
        if th <= half {
            let lhs = cos_turns(&tl, &th, bits);
            let rhs = cos_turns(&rhs_turn, &rhs_turn, bits);
            if lhs.lo >= rhs.hi {
                return Ok(true);
            }
            if lhs.hi < rhs.lo {
                return Ok(false);
            }
        }
        bits *= 2;
    }
    Err(Error::Precision(format!(
        "cosine comparison for n = {} not separated",
        m.n
    )))
}

/// One line of the demo table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoRow {
    pub member: AlphaMember,
    /// `n` is a continued-fraction denominator of `α`.
    pub convergent: bool,
    pub cosine_ok: bool,
}

/// Members of `L(α)` with `n ≤ n_max`.
pub fn scan(alpha: &CertifiedReal, n_max: u64) -> Result<Vec<DemoRow>> {
    let dens: Vec<u64> = hurwitz_candidates(alpha, n_max.max(1))?
        .into_iter()
        .map(|(_, n)| n)
        .collect();
    let mut rows = Vec::new();
    for n in 1..=n_max {
        if let Some(member) = l_alpha_member(alpha, n)? {
            let cosine_ok = limit_check(alpha, &member)?;
            rows.push(DemoRow {
                convergent: dens.contains(&n),
                member,
                cosine_ok,
            });
        }
    }
    Ok(rows)
}
