//! Bounded semilinear languages `{ w₁^{n₁} ⋯ w_k^{n_k} : (n₁,…,n_k) ∈ R }`
//! with `R` a finite union of linear sets.

use crate::error::{Error, Result};

/// One linear set `{ v₀ + λ₁v₁ + … + λ_p v_p }` over fixed words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearComponent {
    pub words: Vec<String>,
    pub base: Vec<u64>,
    pub periods: Vec<Vec<u64>>,
}

impl LinearComponent {
    pub fn new(words: Vec<String>, base: Vec<u64>, periods: Vec<Vec<u64>>) -> Result<Self> {
        let k = words.len();
        if k == 0 {
            return Err(Error::Grammar("semilinear component without words".into()));
        }
        if base.len() != k || periods.iter().any(|p| p.len() != k) {
            return Err(Error::Dimension(format!(
                "semilinear vectors must have length {k}"
            )));
        }
        Ok(LinearComponent {
            words,
            base,
            periods,
        })
    }

    fn word_lens(&self) -> Vec<u64> {
        self.words.iter().map(|w| w.chars().count() as u64).collect()
    }

    /// Word length contributed by a vector of exponents.
    pub fn length_of(&self, v: &[u64]) -> u64 {
        v.iter().zip(self.word_lens()).map(|(a, b)| a * b).sum()
    }

    /// Exponent vector `v₀ + Σ λ_t v_t`.
    pub fn exponents(&self, lambdas: &[u64]) -> Vec<u64> {
        let mut n = self.base.clone();
        for (l, p) in lambdas.iter().zip(&self.periods) {
            for (x, y) in n.iter_mut().zip(p) {
                *x += l * y;
            }
        }
        n
    }

    pub fn word(&self, lambdas: &[u64]) -> String {
        self.exponents(lambdas)
            .iter()
            .zip(&self.words)
            .map(|(&n, w)| w.repeat(n as usize))
            .collect()
    }

    /// Coefficient vectors (zero on zero-length periods) whose word has
    /// length exactly `len`.
    pub(crate) fn coefficients_of_len(&self, len: u64) -> Vec<Vec<u64>> {
        let base = self.length_of(&self.base);
        if len < base {
            return Vec::new();
        }
        let plens: Vec<u64> = self.periods.iter().map(|p| self.length_of(p)).collect();
        let mut out = Vec::new();
        let mut cur = vec![0u64; plens.len()];
        fill(&plens, 0, len - base, &mut cur, &mut out);
        out
    }
}

fn fill(plens: &[u64], t: usize, rest: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if t == plens.len() {
        if rest == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if plens[t] == 0 {
        cur[t] = 0;
        fill(plens, t + 1, rest, cur, out);
        return;
    }
    for l in 0..=rest / plens[t] {
        cur[t] = l;
        fill(plens, t + 1, rest - l * plens[t], cur, out);
    }
    cur[t] = 0;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearLanguage {
    pub alphabet: Vec<char>,
    pub components: Vec<LinearComponent>,
}

impl SemilinearLanguage {
    pub fn new(alphabet: Vec<char>, components: Vec<LinearComponent>) -> Result<Self> {
        for c in &components {
            for w in &c.words {
                if let Some(x) = w.chars().find(|x| !alphabet.contains(x)) {
                    return Err(Error::Grammar(format!("letter {x} not in alphabet")));
                }
            }
        }
        Ok(SemilinearLanguage {
            alphabet,
            components,
        })
    }

    /// Longest word when the language is finite.
    pub(crate) fn max_len(&self) -> Option<u64> {
        let mut m = 0;
        for c in &self.components {
            if c.periods.iter().any(|p| c.length_of(p) > 0) {
                return None;
            }
            m = m.max(c.length_of(&c.base));
        }
        Some(m)
    }

    /// A component and coefficient vector producing `w`, if any.
    pub fn coefficients(&self, w: &str) -> Option<(usize, Vec<u64>)> {
        let len = w.chars().count() as u64;
        self.components.iter().enumerate().find_map(|(i, c)| {
            c.coefficients_of_len(len)
                .into_iter()
                .find(|l| c.word(l) == w)
                .map(|l| (i, l))
        })
    }

    pub fn member(&self, w: &str) -> bool {
        self.coefficients(w).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anbn() -> SemilinearLanguage {
        SemilinearLanguage::new(
            vec!['a', 'b'],
            vec![LinearComponent::new(vec!["a".into(), "b".into()], vec![0, 0], vec![vec![1, 1]]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn words_and_membership() {
        let l = anbn();
        assert_eq!(l.components[0].word(&[2]), "aabb");
        assert!(l.member("aabb"));
        assert!(l.member(""));
        assert!(!l.member("aab"));
        assert!(!l.member("ba"));
        assert_eq!(l.coefficients("ab"), Some((0, vec![1])));
        assert_eq!(l.max_len(), None);
    }

    #[test]
    fn shape_errors() {
        assert!(LinearComponent::new(vec![], vec![], vec![]).is_err());
        assert!(LinearComponent::new(vec!["a".into()], vec![0, 1], vec![]).is_err());
    }

    #[test]
    fn zero_length_periods_are_skipped() {
        let c = LinearComponent::new(vec!["".into(), "a".into()], vec![0, 1], vec![vec![1, 0]]).unwrap();
        assert_eq!(c.coefficients_of_len(1), vec![vec![0]]);
        let l = SemilinearLanguage::new(vec!['a'], vec![c]).unwrap();
        assert_eq!(l.max_len(), Some(1));
    }
}
