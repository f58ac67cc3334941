//! Measure-once quantum automata with exact rational data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratmat::{is_orthogonal, is_projection, QMat, QVec, Rat};

/// A rational measure-once quantum automaton `(s, φ, P, λ)`.
///
/// A word `w` is accepted with strict threshold when `‖s φ(w) P‖ > λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumAutomaton {
    pub s: QVec,
    /// Alphabet in its declared order.
    pub letters: Vec<char>,
    pub phi: BTreeMap<char, QMat>,
    pub projection: QMat,
    pub lambda: Rat,
}

impl QuantumAutomaton {
    /// Builds and validates an automaton.
    pub fn new(
        s: QVec,
        phi: Vec<(char, QMat)>,
        projection: QMat,
        lambda: Rat,
    ) -> Result<Self> {
        let letters = phi.iter().map(|(c, _)| *c).collect();
        let q = QuantumAutomaton {
            s,
            letters,
            phi: phi.into_iter().collect(),
            projection,
            lambda,
        };
        let violations = validate(&q);
        if violations.is_empty() {
            Ok(q)
        } else {
            Err(Error::InvalidAutomaton(violations))
        }
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn letter_matrix(&self, c: char) -> Result<&QMat> {
        self.phi.get(&c).ok_or(Error::UnknownLetter(c))
    }

    /// `λ²` for `λ ≥ 0`, `None` when every word is accepted (`λ < 0`).
    pub fn lambda_sq(&self) -> Option<Rat> {
        (!self.lambda.is_negative()).then(|| &self.lambda * &self.lambda)
    }

    /// `‖s M P‖²` for an arbitrary matrix `M`.
    pub fn value_of_matrix(&self, m: &QMat) -> Result<Rat> {
        let v = self.s.mul_mat(m)?.mul_mat(&self.projection)?;
        Ok(v.norm_sq())
    }

    /// Strict acceptance test on a precomputed squared value.
    pub fn exceeds_threshold(&self, value_sq: &Rat) -> bool {
        match self.lambda_sq() {
            None => true,
            Some(l2) => *value_sq > l2,
        }
    }
}

/// Lists every violated invariant; empty means the automaton is well formed.
pub fn validate(q: &QuantumAutomaton) -> Vec<String> {
    let n = q.s.len();
    let mut out = Vec::new();
    if !q.s.norm_sq().is_one() {
        out.push("s not unit norm".to_string());
    }
    let mut seen = std::collections::BTreeSet::new();
    for c in &q.letters {
        if !seen.insert(*c) {
            out.push(format!("letter {c} declared twice"));
        }
        if !q.phi.contains_key(c) {
            out.push(format!("phi({c}) missing"));
        }
    }
    for (c, m) in &q.phi {
        if !q.letters.contains(c) {
            out.push(format!("phi({c}) given for undeclared letter"));
        }
        if m.rows() != n || m.cols() != n {
            out.push(format!("phi({c}) is {}x{}, expected {n}x{n}", m.rows(), m.cols()));
        } else if !is_orthogonal(m) {
            out.push(format!("phi({c}) not orthogonal"));
        }
    }
    if q.projection.rows() != n || q.projection.cols() != n {
        out.push(format!(
            "P is {}x{}, expected {n}x{n}",
            q.projection.rows(),
            q.projection.cols()
        ));
    } else if !is_projection(&q.projection) {
        out.push("P not a projection".to_string());
    }
    out
}

/// `φ(w₁)⋯φ(w_m)`; the empty word maps to the identity.
pub fn phi_word(q: &QuantumAutomaton, w: &str) -> Result<QMat> {
    let mut acc = QMat::identity(q.dim());
    for c in w.chars() {
        acc = acc.mul(q.letter_matrix(c)?)?;
    }
    Ok(acc)
}

/// Exact squared acceptance value `‖s φ(w) P‖²`.
pub fn acceptance_sq(q: &QuantumAutomaton, w: &str) -> Result<Rat> {
    let mut v = q.s.clone();
    for c in w.chars() {
        v = v.mul_mat(q.letter_matrix(c)?)?;
    }
    Ok(v.mul_mat(&q.projection)?.norm_sq())
}

/// Integer matrix `A` with common denominator `d`, representing `A / d`.
#[derive(Clone, Debug)]
struct ScaledMat {
    n: usize,
    num: Vec<BigInt>,
    den: BigInt,
}

impl ScaledMat {
    fn new(m: &QMat) -> Self {
        let den = m
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num = m
            .entries()
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        ScaledMat { n: m.cols(), num, den }
    }

    fn left_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.n)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| x * &self.num[i * self.n + j])
                    .sum()
            })
            .collect()
    }
}

/// Evaluates a stream of words, reusing the state of the prefix shared with
/// the previous word. States are kept as integer vectors over a common
/// denominator, so no gcd is taken per letter.
#[derive(Clone, Debug)]
pub struct PrefixEvaluator<'a> {
    q: &'a QuantumAutomaton,
    letters: BTreeMap<char, ScaledMat>,
    projection: ScaledMat,
    prefix: Vec<char>,
    /// `states[i] = (v, d)` with `v / d = s φ(prefix[..i])`.
    states: Vec<(Vec<BigInt>, BigInt)>,
}

impl<'a> PrefixEvaluator<'a> {
    pub fn new(q: &'a QuantumAutomaton) -> Self {
        let den = q.s.entries().iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let v = q.s.entries().iter().map(|x| x.numer() * (&den / x.denom())).collect();
        PrefixEvaluator {
            q,
            letters: q.phi.iter().map(|(c, m)| (*c, ScaledMat::new(m))).collect(),
            projection: ScaledMat::new(&q.projection),
            prefix: Vec::new(),
            states: vec![(v, den)],
        }
    }

    /// `‖s φ(w) P‖²` as an unreduced fraction.
    fn value_parts(&mut self, w: &str) -> Result<(BigInt, BigInt)> {
        let chars: Vec<char> = w.chars().collect();
        let common = self
            .prefix
            .iter()
            .zip(&chars)
            .take_while(|(a, b)| a == b)
            .count();
        self.prefix.truncate(common);
        self.states.truncate(common + 1);
        for &c in &chars[common..] {
            let m = self.letters.get(&c).ok_or(Error::UnknownLetter(c))?;
            let (v, d) = &self.states[self.states.len() - 1];
            let next = (m.left_mul(v), d * &m.den);
            self.prefix.push(c);
            self.states.push(next);
        }
        let (v, d) = &self.states[self.states.len() - 1];
        let y = self.projection.left_mul(v);
        let num: BigInt = y.iter().map(|x| x * x).sum();
        let den = d * &self.projection.den;
        Ok((num, &den * &den))
    }

    /// Same value as [`acceptance_sq`].
    pub fn acceptance_sq(&mut self, w: &str) -> Result<Rat> {
        let (num, den) = self.value_parts(w)?;
        Ok(Rat::new(num, den))
    }

    /// Strict acceptance, decided by integer cross-multiplication.
    pub fn accepts(&mut self, w: &str) -> Result<bool> {
        let (num, den) = self.value_parts(w)?;
        Ok(match self.q.lambda_sq() {
            None => true,
            Some(l2) => num * l2.denom() > l2.numer() * den,
        })
    }
}

/// Membership in the strict cut-point language.
pub fn accepts_strict(q: &QuantumAutomaton, w: &str) -> Result<bool> {
    let v = acceptance_sq(q, w)?;
    Ok(q.exceeds_threshold(&v))
}
