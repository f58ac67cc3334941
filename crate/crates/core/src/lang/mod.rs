//! Languages: Σ*, bounded semilinear, and linear context-free.

mod grammar;
mod semilinear;

use std::collections::{BTreeSet, VecDeque};

pub use grammar::{
    context_automaton, context_generators, context_label, decompose, derivation, grammar_member,
    productive, sub_grammar, Branch, ContextAutomaton, ContextTransition, Decomposition,
    LinearGrammar, Rule,
};
pub use semilinear::{LinearComponent, SemilinearLanguage};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LanguageSpec {
    SigmaStar { alphabet: Vec<char> },
    Semilinear(SemilinearLanguage),
    LinearCfg(LinearGrammar),
}

impl LanguageSpec {
    pub fn alphabet(&self) -> &[char] {
        match self {
            LanguageSpec::SigmaStar { alphabet } => alphabet,
            LanguageSpec::Semilinear(l) => &l.alphabet,
            LanguageSpec::LinearCfg(g) => &g.alphabet,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LanguageSpec::SigmaStar { .. } => "sigma-star",
            LanguageSpec::Semilinear(_) => "semilinear",
            LanguageSpec::LinearCfg(_) => "linear-cfg",
        }
    }
}

/// Sort key realising length-lexicographic order under the alphabet order.
pub fn word_key(alphabet: &[char], w: &str) -> (usize, Vec<usize>) {
    let idx: Vec<usize> = w
        .chars()
        .map(|c| alphabet.iter().position(|&a| a == c).unwrap_or(usize::MAX))
        .collect();
    (idx.len(), idx)
}

pub fn membership(spec: &LanguageSpec, w: &str) -> bool {
    match spec {
        LanguageSpec::SigmaStar { alphabet } => w.chars().all(|c| alphabet.contains(&c)),
        LanguageSpec::Semilinear(l) => l.member(w),
        LanguageSpec::LinearCfg(g) => grammar_member(g, w),
    }
}

/// Words of the grammar, length by length. `table[len][nt]` holds the words
/// of that length derivable from each nonterminal.
struct CfgLayers {
    g: LinearGrammar,
    table: Vec<Vec<BTreeSet<String>>>,
}

impl CfgLayers {
    fn layer(&mut self, len: usize) -> Vec<String> {
        while self.table.len() <= len {
            self.extend();
        }
        let mut out: Vec<String> = self.table[len][self.g.axiom_index()].iter().cloned().collect();
        out.sort_by_key(|w| word_key(&self.g.alphabet, w));
        out
    }

    fn extend(&mut self) {
        let len = self.table.len();
        let nts = self.g.nonterminals.len();
        let mut row: Vec<BTreeSet<String>> = vec![BTreeSet::new(); nts];
        let idx = |n: &str| self.g.index_of(n).unwrap();
        for r in &self.g.rules {
            let a = idx(r.lhs());
            match r {
                Rule::Terminal { w, .. } if w.chars().count() == len => {
                    row[a].insert(w.clone());
                }
                Rule::Linear { u, mid, v, .. } if r.terminal_len() > 0 && r.terminal_len() <= len => {
                    let inner = &self.table[len - r.terminal_len()][idx(mid)];
                    for x in inner {
                        row[a].insert(format!("{u}{x}{v}"));
                    }
                }
                _ => {}
            }
        }
        // rules producing no letters stay within the layer
        loop {
            let mut changed = false;
            for r in &self.g.rules {
                if let Rule::Linear { lhs, mid, .. } = r {
                    if r.terminal_len() == 0 {
                        let (a, b) = (idx(lhs), idx(mid));
                        if a != b {
                            let add: Vec<String> = row[b].difference(&row[a]).cloned().collect();
                            if !add.is_empty() {
                                changed = true;
                                row[a].extend(add);
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.table.push(row);
    }
}

enum Source {
    Sigma { alphabet: Vec<char>, counter: Option<Vec<usize>> },
    Semilinear(SemilinearLanguage),
    Cfg(Box<CfgLayers>),
}

/// Lazy length-lexicographic enumeration of a language without repeats.
pub struct Words {
    source: Source,
    len: usize,
    buffer: VecDeque<String>,
    /// No word is longer than this.
    limit: Option<usize>,
}

impl Words {
    pub fn new(spec: &LanguageSpec) -> Self {
        let (source, limit) = match spec {
            LanguageSpec::SigmaStar { alphabet } => (
                Source::Sigma {
                    alphabet: alphabet.clone(),
                    counter: Some(Vec::new()),
                },
                alphabet.is_empty().then_some(0),
            ),
            LanguageSpec::Semilinear(l) => (
                Source::Semilinear(l.clone()),
                l.max_len().map(|m| m as usize),
            ),
            LanguageSpec::LinearCfg(g) => {
                let limit = if !productive(g).contains(&g.axiom) {
                    // empty language: no layer can contain a word
                    Some(0)
                } else if grammar::is_infinite(g) {
                    None
                } else {
                    let m = g.rules.iter().map(|r| r.terminal_len()).max().unwrap_or(0);
                    Some(m * (g.nonterminals.len() + 1))
                };
                (
                    Source::Cfg(Box::new(CfgLayers {
                        g: g.clone(),
                        table: Vec::new(),
                    })),
                    limit,
                )
            }
        };
        Words {
            source,
            len: 0,
            buffer: VecDeque::new(),
            limit,
        }
    }

    /// Stops after words of length `max_len`.
    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.limit = Some(self.limit.map_or(max_len, |l| l.min(max_len)));
        self
    }
}

impl Iterator for Words {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if let Source::Sigma { alphabet, counter } = &mut self.source {
            let cur = counter.as_mut()?;
            if self.limit.is_some_and(|l| cur.len() > l) {
                *counter = None;
                return None;
            }
            let w: String = cur.iter().map(|&i| alphabet[i]).collect();
            // advance the mixed-radix counter, growing the length on overflow
            let k = alphabet.len();
            let mut i = cur.len();
            loop {
                if i == 0 {
                    let n = cur.len() + 1;
                    *cur = vec![0; n];
                    break;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < k {
                    break;
                }
                cur[i] = 0;
            }
            if k == 0 {
                *counter = None;
            }
            return Some(w);
        }
        loop {
            if let Some(w) = self.buffer.pop_front() {
                return Some(w);
            }
            if self.limit.is_some_and(|l| self.len > l) {
                return None;
            }
            let len = self.len;
            self.len += 1;
            let layer: Vec<String> = match &mut self.source {
                Source::Semilinear(l) => {
                    let mut set = BTreeSet::new();
                    for c in &l.components {
                        for lam in c.coefficients_of_len(len as u64) {
                            set.insert(c.word(&lam));
                        }
                    }
                    let mut v: Vec<String> = set.into_iter().collect();
                    v.sort_by_key(|w| word_key(&l.alphabet, w));
                    v
                }
                Source::Cfg(c) => c.layer(len),
                Source::Sigma { .. } => unreachable!(),
            };
            self.buffer.extend(layer);
        }
    }
}

/// The first `max_count` words of length at most `max_len`.
pub fn enumerate_words(spec: &LanguageSpec, max_count: usize, max_len: usize) -> Vec<String> {
    Words::new(spec).with_max_len(max_len).take(max_count).collect()
}
