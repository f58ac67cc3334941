//! Linear grammars, their decomposition around the axiom, and the context
//! automaton whose path labels generate the context matrices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::qfa::{phi_word, QuantumAutomaton};
use crate::ratmat::{block_sum, QMat};

/// A production `lhs → u mid v` or `lhs → w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Linear {
        lhs: String,
        u: String,
        mid: String,
        v: String,
    },
    Terminal {
        lhs: String,
        w: String,
    },
}

impl Rule {
    pub fn linear(lhs: &str, u: &str, mid: &str, v: &str) -> Self {
        Rule::Linear {
            lhs: lhs.into(),
            u: u.into(),
            mid: mid.into(),
            v: v.into(),
        }
    }

    pub fn terminal(lhs: &str, w: &str) -> Self {
        Rule::Terminal {
            lhs: lhs.into(),
            w: w.into(),
        }
    }

    pub fn lhs(&self) -> &str {
        match self {
            Rule::Linear { lhs, .. } | Rule::Terminal { lhs, .. } => lhs,
        }
    }

    /// The nonterminal on the right-hand side, if any.
    pub fn mid(&self) -> Option<&str> {
        match self {
            Rule::Linear { mid, .. } => Some(mid),
            Rule::Terminal { .. } => None,
        }
    }

    /// Number of terminal letters produced.
    pub fn terminal_len(&self) -> usize {
        match self {
            Rule::Linear { u, v, .. } => u.chars().count() + v.chars().count(),
            Rule::Terminal { w, .. } => w.chars().count(),
        }
    }

    fn letters(&self) -> impl Iterator<Item = char> + '_ {
        let (a, b) = match self {
            Rule::Linear { u, v, .. } => (u.as_str(), v.as_str()),
            Rule::Terminal { w, .. } => (w.as_str(), ""),
        };
        a.chars().chain(b.chars())
    }
}

/// A linear context-free grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearGrammar {
    pub nonterminals: Vec<String>,
    pub alphabet: Vec<char>,
    pub rules: Vec<Rule>,
    pub axiom: String,
}

impl LinearGrammar {
    pub fn new(
        nonterminals: Vec<String>,
        alphabet: Vec<char>,
        rules: Vec<Rule>,
        axiom: &str,
    ) -> Result<Self> {
        let g = LinearGrammar {
            nonterminals,
            alphabet,
            rules,
            axiom: axiom.to_string(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Builds a grammar whose nonterminals are those named by the rules,
    /// axiom first.
    pub fn from_rules(alphabet: &[char], axiom: &str, rules: Vec<Rule>) -> Result<Self> {
        let mut nts = vec![axiom.to_string()];
        for r in &rules {
            for n in std::iter::once(r.lhs()).chain(r.mid()) {
                if !nts.iter().any(|x| x == n) {
                    nts.push(n.to_string());
                }
            }
        }
        LinearGrammar::new(nts, alphabet.to_vec(), rules, axiom)
    }

    fn validate(&self) -> Result<()> {
        let nts: BTreeSet<&str> = self.nonterminals.iter().map(String::as_str).collect();
        if nts.len() != self.nonterminals.len() {
            return Err(Error::Grammar("duplicate nonterminal".into()));
        }
        if !nts.contains(self.axiom.as_str()) {
            return Err(Error::Grammar(format!("axiom {} is not a nonterminal", self.axiom)));
        }
        let letters: BTreeSet<char> = self.alphabet.iter().copied().collect();
        if letters.len() != self.alphabet.len() {
            return Err(Error::Grammar("duplicate letter in alphabet".into()));
        }
        for r in &self.rules {
            for n in std::iter::once(r.lhs()).chain(r.mid()) {
                if !nts.contains(n) {
                    return Err(Error::Grammar(format!("unknown nonterminal {n}")));
                }
            }
            if let Some(c) = r.letters().find(|c| !letters.contains(c)) {
                return Err(Error::Grammar(format!("letter {c} not in alphabet")));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, nt: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n == nt)
    }

    pub(crate) fn axiom_index(&self) -> usize {
        self.index_of(&self.axiom).expect("validated axiom")
    }

    /// Rules with the given left-hand side, with their indices.
    pub fn rules_of<'a>(&'a self, nt: &'a str) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules.iter().enumerate().filter(move |(_, r)| r.lhs() == nt)
    }
}

/// The grammar rooted at `a` over the nonterminals other than the axiom:
/// only rules that neither start from nor produce the axiom survive.
pub fn sub_grammar(g: &LinearGrammar, a: &str) -> Result<LinearGrammar> {
    if a == g.axiom {
        return Err(Error::Grammar(format!("{a} is the axiom")));
    }
    if g.index_of(a).is_none() {
        return Err(Error::Grammar(format!("unknown nonterminal {a}")));
    }
    let s = g.axiom.as_str();
    let rules = g
        .rules
        .iter()
        .filter(|r| r.lhs() != s && r.mid() != Some(s))
        .cloned()
        .collect();
    let nonterminals = g.nonterminals.iter().filter(|n| *n != s).cloned().collect();
    LinearGrammar::new(nonterminals, g.alphabet.clone(), rules, a)
}

/// An axiom rule whose right-hand side avoids the axiom: `w₁` alone, or
/// `w₁ A₁ w₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub rule: usize,
    pub w1: String,
    pub a1: Option<String>,
    pub w2: String,
}

/// The language is the context set of the axiom applied to the union of the
/// branch languages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub branches: Vec<Branch>,
}

pub fn decompose(g: &LinearGrammar) -> Decomposition {
    let branches = g
        .rules_of(&g.axiom)
        .filter_map(|(i, r)| match r {
            Rule::Terminal { w, .. } => Some(Branch {
                rule: i,
                w1: w.clone(),
                a1: None,
                w2: String::new(),
            }),
            Rule::Linear { u, mid, v, .. } if *mid != g.axiom => Some(Branch {
                rule: i,
                w1: u.clone(),
                a1: Some(mid.clone()),
                w2: v.clone(),
            }),
            Rule::Linear { .. } => None,
        })
        .collect();
    Decomposition { branches }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextTransition {
    pub from: String,
    pub to: String,
    pub rule: usize,
    /// `φ(u) ⊕ φ(v)ᵀ`.
    pub label: QMat,
}

/// Automaton over the nonterminals whose S→S path labels are exactly the
/// context matrices of the axiom.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextAutomaton {
    pub states: Vec<String>,
    pub transitions: Vec<ContextTransition>,
    pub initial: String,
    /// Half the label dimension.
    pub dim: usize,
}

/// `φ(u) ⊕ φ(v)ᵀ`.
pub fn context_label(q: &QuantumAutomaton, u: &str, v: &str) -> Result<QMat> {
    block_sum(&[phi_word(q, u)?, phi_word(q, v)?.transpose()])
}

fn reach(start: &str, edges: &[(String, String)], forward: bool) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([start.to_string()]);
    let mut queue = VecDeque::from([start.to_string()]);
    while let Some(x) = queue.pop_front() {
        for (a, b) in edges {
            let (src, dst) = if forward { (a, b) } else { (b, a) };
            if *src == x && seen.insert(dst.clone()) {
                queue.push_back(dst.clone());
            }
        }
    }
    seen
}

/// Trimmed context automaton: only states on some path from the axiom back
/// to itself are kept.
pub fn context_automaton(g: &LinearGrammar, q: &QuantumAutomaton) -> Result<ContextAutomaton> {
    let edges: Vec<(String, String)> = g
        .rules
        .iter()
        .filter_map(|r| r.mid().map(|m| (r.lhs().to_string(), m.to_string())))
        .collect();
    let fwd = reach(&g.axiom, &edges, true);
    let bwd = reach(&g.axiom, &edges, false);
    let live: BTreeSet<&String> = fwd.intersection(&bwd).collect();
    let states: Vec<String> = g
        .nonterminals
        .iter()
        .filter(|n| live.contains(n))
        .cloned()
        .collect();
    let mut transitions = Vec::new();
    for (i, r) in g.rules.iter().enumerate() {
        if let Rule::Linear { lhs, u, mid, v } = r {
            if live.contains(lhs) && live.contains(mid) {
                transitions.push(ContextTransition {
                    from: lhs.clone(),
                    to: mid.clone(),
                    rule: i,
                    label: context_label(q, u, v)?,
                });
            }
        }
    }
    let has_cycle = transitions.iter().any(|t| t.from == g.axiom);
    Ok(ContextAutomaton {
        states: if has_cycle { states } else { vec![g.axiom.clone()] },
        transitions: if has_cycle { transitions } else { Vec::new() },
        initial: g.axiom.clone(),
        dim: q.dim(),
    })
}

/// Finite generating set of the group generated by all S→S path labels.
///
/// A breadth-first spanning tree from the initial state assigns each state
/// `q` the label `l_q` of its tree path; every transition `q → q'` then
/// contributes `l_q · label · l_{q'}ᵀ`. Identities and repeats are dropped.
pub fn context_generators(ca: &ContextAutomaton) -> Result<Vec<QMat>> {
    let mut l: BTreeMap<&str, QMat> = BTreeMap::new();
    l.insert(&ca.initial, QMat::identity(2 * ca.dim));
    let mut queue = VecDeque::from([ca.initial.as_str()]);
    while let Some(x) = queue.pop_front() {
        for t in ca.transitions.iter().filter(|t| t.from == x) {
            if !l.contains_key(t.to.as_str()) {
                let lt = l[x].mul(&t.label)?;
                l.insert(&t.to, lt);
                queue.push_back(&t.to);
            }
        }
    }
    let mut out: Vec<QMat> = Vec::new();
    for t in &ca.transitions {
        let (Some(a), Some(b)) = (l.get(t.from.as_str()), l.get(t.to.as_str())) else {
            continue;
        };
        let y = a.mul(&t.label)?.mul(&b.transpose())?;
        if !y.is_identity() && !out.contains(&y) {
            out.push(y);
        }
    }
    Ok(out)
}

/// Membership table: `table[len][start]` holds, for every nonterminal, the
/// index of a rule deriving `w[start..start+len]` from it.
fn span_table(g: &LinearGrammar, w: &[char]) -> Vec<Vec<Vec<Option<usize>>>> {
    let n = w.len();
    let nts = g.nonterminals.len();
    let rule_parts: Vec<(usize, Option<usize>, Vec<char>, Vec<char>)> = g
        .rules
        .iter()
        .map(|r| {
            let lhs = g.index_of(r.lhs()).unwrap();
            match r {
                Rule::Linear { u, mid, v, .. } => (
                    lhs,
                    g.index_of(mid),
                    u.chars().collect(),
                    v.chars().collect(),
                ),
                Rule::Terminal { w, .. } => (lhs, None, w.chars().collect(), Vec::new()),
            }
        })
        .collect();
    let mut table = vec![vec![vec![None; nts]; n + 1]; n + 1];
    for len in 0..=n {
        for start in 0..=n - len {
            let span = &w[start..start + len];
            // unit rules may chain within one span, so iterate to a fixpoint
            loop {
                let mut changed = false;
                for (ri, (lhs, mid, u, v)) in rule_parts.iter().enumerate() {
                    if table[len][start][*lhs].is_some() {
                        continue;
                    }
                    let ok = match mid {
                        None => span == u.as_slice(),
                        Some(b) => {
                            let k = u.len() + v.len();
                            k <= len
                                && span.starts_with(u)
                                && span.ends_with(v)
                                && table[len - k][start + u.len()][*b].is_some()
                        }
                    };
                    if ok {
                        table[len][start][*lhs] = Some(ri);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
    }
    table
}

pub fn grammar_member(g: &LinearGrammar, w: &str) -> bool {
    let chars: Vec<char> = w.chars().collect();
    let table = span_table(g, &chars);
    table[chars.len()][0][g.axiom_index()].is_some()
}

/// Rule indices of a leftmost derivation of `w` from the axiom.
pub fn derivation(g: &LinearGrammar, w: &str) -> Option<Vec<usize>> {
    let chars: Vec<char> = w.chars().collect();
    let table = span_table(g, &chars);
    let mut nt = g.axiom_index();
    let (mut start, mut len) = (0usize, chars.len());
    let mut out = Vec::new();
    loop {
        let ri = table[len][start][nt]?;
        out.push(ri);
        match &g.rules[ri] {
            Rule::Terminal { .. } => return Some(out),
            Rule::Linear { u, mid, v, .. } => {
                let (lu, lv) = (u.chars().count(), v.chars().count());
                start += lu;
                len -= lu + lv;
                nt = g.index_of(mid).unwrap();
            }
        }
    }
}

/// Nonterminals that derive some terminal word.
pub fn productive(g: &LinearGrammar) -> BTreeSet<String> {
    let mut prod: BTreeSet<String> = BTreeSet::new();
    loop {
        let before = prod.len();
        for r in &g.rules {
            if r.mid().is_none_or(|m| prod.contains(m)) {
                prod.insert(r.lhs().to_string());
            }
        }
        if prod.len() == before {
            return prod;
        }
    }
}

/// True when the language is infinite: some useful cycle produces a letter.
pub(crate) fn is_infinite(g: &LinearGrammar) -> bool {
    let prod = productive(g);
    let edges: Vec<(String, String)> = g
        .rules
        .iter()
        .filter_map(|r| r.mid().map(|m| (r.lhs().to_string(), m.to_string())))
        .filter(|(a, b)| prod.contains(a) && prod.contains(b))
        .collect();
    let reachable = reach(&g.axiom, &edges, true);
    g.rules.iter().any(|r| match r.mid() {
        Some(m) if r.terminal_len() > 0 && reachable.contains(r.lhs()) && prod.contains(m) => {
            reach(m, &edges, true).contains(r.lhs())
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::{int, QVec};

    pub(crate) fn palindromes() -> LinearGrammar {
        LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![
                Rule::linear("S", "a", "S", "a"),
                Rule::linear("S", "b", "S", "b"),
                Rule::terminal("S", ""),
            ],
        )
        .unwrap()
    }

    fn rot90() -> QMat {
        QMat::from_ints(&[&[0, -1], &[1, 0]])
    }

    fn qfa(letters: &[(char, QMat)]) -> QuantumAutomaton {
        QuantumAutomaton::new(
            QVec::new(vec![int(1), int(0)]),
            letters.to_vec(),
            QMat::identity(2),
            int(0),
        )
        .unwrap()
    }

    #[test]
    fn sub_grammars() {
        let g = LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![
                Rule::linear("S", "a", "S", "a"),
                Rule::linear("S", "a", "A", ""),
                Rule::linear("A", "b", "A", ""),
                Rule::terminal("A", ""),
            ],
        )
        .unwrap();
        let a = sub_grammar(&g, "A").unwrap();
        assert_eq!(a.axiom, "A");
        assert_eq!(a.rules, vec![Rule::linear("A", "b", "A", ""), Rule::terminal("A", "")]);
        assert!(matches!(sub_grammar(&g, "S"), Err(Error::Grammar(_))));
        assert!(matches!(sub_grammar(&palindromes(), "S"), Err(Error::Grammar(_))));

        let g = LinearGrammar::from_rules(
            &['c'],
            "S",
            vec![Rule::terminal("S", ""), Rule::terminal("B", "c")],
        )
        .unwrap();
        assert_eq!(sub_grammar(&g, "B").unwrap().rules, vec![Rule::terminal("B", "c")]);
    }

    #[test]
    fn decompositions() {
        let d = decompose(&palindromes());
        assert_eq!(
            d.branches,
            vec![Branch {
                rule: 2,
                w1: String::new(),
                a1: None,
                w2: String::new()
            }]
        );
        let g = LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![Rule::linear("S", "a", "A", ""), Rule::terminal("A", "b")],
        )
        .unwrap();
        let d = decompose(&g);
        assert_eq!(d.branches.len(), 1);
        assert_eq!(d.branches[0].w1, "a");
        assert_eq!(d.branches[0].a1.as_deref(), Some("A"));
        assert_eq!(d.branches[0].w2, "");
        let g = LinearGrammar::from_rules(&['a', 'b'], "S", vec![Rule::terminal("S", "ab")]).unwrap();
        assert_eq!(decompose(&g).branches[0].w1, "ab");
    }

    #[test]
    fn automata_and_generators() {
        let r180 = rot90().mul(&rot90()).unwrap();
        let q = qfa(&[('a', rot90()), ('b', r180.clone())]);
        let ca = context_automaton(&palindromes(), &q).unwrap();
        assert_eq!(ca.states, vec!["S"]);
        assert_eq!(ca.transitions.len(), 2);
        let la = block_sum(&[rot90(), rot90().transpose()]).unwrap();
        let lb = block_sum(&[r180.clone(), r180.transpose()]).unwrap();
        assert_eq!(ca.transitions[0].label, la);
        assert_eq!(context_generators(&ca).unwrap(), vec![la, lb]);

        let g = LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![Rule::linear("S", "a", "A", ""), Rule::terminal("A", "b")],
        )
        .unwrap();
        let ca = context_automaton(&g, &q).unwrap();
        assert!(ca.transitions.is_empty());
        assert!(context_generators(&ca).unwrap().is_empty());
    }

    #[test]
    fn two_state_cycle() {
        let m = QMat::from_fracs(&[&[(3, 5), (4, 5)], &[(-4, 5), (3, 5)]]);
        let q = qfa(&[('a', m.clone()), ('b', rot90())]);
        let g = LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![
                Rule::linear("S", "a", "Q", ""),
                Rule::linear("Q", "b", "S", ""),
                Rule::terminal("S", ""),
            ],
        )
        .unwrap();
        let ca = context_automaton(&g, &q).unwrap();
        let gens = context_generators(&ca).unwrap();
        let ab = context_label(&q, "ab", "").unwrap();
        assert_eq!(gens, vec![ab]);
    }

    #[test]
    fn membership_and_derivations() {
        let g = palindromes();
        assert!(grammar_member(&g, "abba"));
        assert!(grammar_member(&g, ""));
        assert!(!grammar_member(&g, "ab"));
        assert!(!grammar_member(&g, "aba"));
        assert_eq!(derivation(&g, "abba"), Some(vec![0, 1, 2]));
        assert_eq!(derivation(&g, "ab"), None);
        assert!(is_infinite(&g));
        let fin = LinearGrammar::from_rules(&['a'], "S", vec![Rule::linear("S", "", "A", ""), Rule::linear("A", "", "S", ""), Rule::terminal("A", "a")]).unwrap();
        assert!(!is_infinite(&fin));
        assert!(grammar_member(&fin, "a"));
    }
}
