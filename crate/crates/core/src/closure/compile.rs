use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::expr::{block_power, ClosureExpr};
use crate::error::{Error, Result};
use crate::lang::{
    context_automaton, context_generators, decompose, derivation, sub_grammar, LanguageSpec,
    LinearGrammar, Rule,
};
use crate::poly::{invariant_space, matrix_var, Poly, Var};
use crate::qfa::{phi_word, QuantumAutomaton};
use crate::ratmat::{check_entry_permutation, QMat, Rat};

/// Square matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMat {
    n: usize,
    data: Vec<Poly>,
}

impl PolyMat {
    pub fn constant(m: &QMat) -> Self {
        PolyMat {
            n: m.rows(),
            data: m.entries().iter().map(|c| Poly::constant(c.clone())).collect(),
        }
    }

    /// Matrix of unknowns `x_{ij} = offset + i·n + j`.
    pub fn unknowns(n: usize, offset: Var) -> Self {
        PolyMat {
            n,
            data: (0..n * n)
                .map(|k| Poly::var(offset + matrix_var(n, k / n, k % n)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.n + j]
    }

    pub fn mul(&self, o: &PolyMat) -> PolyMat {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Poly::zero();
                for k in 0..n {
                    let (a, b) = (self.entry(i, k), o.entry(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                data.push(acc);
            }
        }
        PolyMat { n, data }
    }

    pub fn transpose(&self) -> PolyMat {
        let n = self.n;
        PolyMat {
            n,
            data: (0..n * n).map(|k| self.entry(k % n, k / n).clone()).collect(),
        }
    }

    fn shift_vars(&self, by: Var) -> PolyMat {
        PolyMat {
            n: self.n,
            data: self.data.iter().map(|p| p.shift_vars(by)).collect(),
        }
    }

    fn block_sum(ms: &[PolyMat]) -> PolyMat {
        let n: usize = ms.iter().map(|m| m.n).sum();
        let mut data = vec![Poly::zero(); n * n];
        let mut off = 0;
        for m in ms {
            for i in 0..m.n {
                for j in 0..m.n {
                    data[(off + i) * n + off + j] = m.entry(i, j).clone();
                }
            }
            off += m.n;
        }
        PolyMat { n, data }
    }

    /// Diagonal block `b` of size `size`.
    fn block(&self, b: usize, size: usize) -> PolyMat {
        PolyMat {
            n: size,
            data: (0..size * size)
                .map(|k| self.entry(b * size + k / size, b * size + k % size).clone())
                .collect(),
        }
    }

    fn permute(&self, pi: &[(usize, usize)]) -> PolyMat {
        PolyMat {
            n: self.n,
            data: pi.iter().map(|&(i, j)| self.entry(i, j).clone()).collect(),
        }
    }

    pub fn eval_at(&self, point: &[Rat]) -> Result<QMat> {
        let data = self
            .data
            .iter()
            .map(|p| p.eval_at(point))
            .collect::<Result<Vec<_>>>()?;
        QMat::new(self.n, self.n, data)
    }

    pub fn max_degree(&self) -> u32 {
        self.data.iter().map(Poly::total_degree).max().unwrap_or(0)
    }
}

impl fmt::Display for PolyMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: Var| format!("v{v}");
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| self.entry(i, j).display_with(&name))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Variables of one group-closure leaf: `dim²` consecutive indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafVars {
    pub dim: usize,
    pub offset: Var,
}

impl LeafVars {
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..(self.dim * self.dim) as Var).map(move |k| self.offset + k)
    }
}

/// Polynomial description of one union branch at a fixed degree level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub leaves: Vec<LeafVars>,
    pub equalities: Vec<Poly>,
    pub target: PolyMat,
    /// Branch taken at every union node, in pre-order.
    pub choices: Vec<usize>,
}

impl ConstraintSystem {
    pub fn num_vars(&self) -> usize {
        self.leaves.iter().map(|l| l.dim * l.dim).sum()
    }

    fn fixed(m: &QMat) -> Self {
        ConstraintSystem {
            leaves: Vec::new(),
            equalities: Vec::new(),
            target: PolyMat::constant(m),
            choices: Vec::new(),
        }
    }

    /// Renames `o` apart and concatenates; returns the shifted target of `o`.
    fn absorb(&mut self, o: &ConstraintSystem) -> PolyMat {
        let by = self.num_vars() as Var;
        self.leaves.extend(o.leaves.iter().map(|l| LeafVars {
            dim: l.dim,
            offset: l.offset + by,
        }));
        self.equalities
            .extend(o.equalities.iter().map(|p| p.shift_vars(by)));
        self.choices.extend(o.choices.iter().copied());
        o.target.shift_vars(by)
    }

    /// Point whose coordinates are the leaf matrices' entries.
    pub fn point(&self, leaves: &[QMat]) -> Result<Vec<Rat>> {
        if leaves.len() != self.leaves.len() {
            return Err(Error::WitnessShape(format!(
                "{} leaf matrices for {} leaves",
                leaves.len(),
                self.leaves.len()
            )));
        }
        let mut point = vec![Rat::zero(); self.num_vars()];
        for (l, m) in self.leaves.iter().zip(leaves) {
            if m.rows() != l.dim || m.cols() != l.dim {
                return Err(Error::WitnessShape(format!(
                    "leaf expects {0}x{0}, got {1}x{2}",
                    l.dim,
                    m.rows(),
                    m.cols()
                )));
            }
            for (k, c) in m.entries().iter().enumerate() {
                point[l.offset as usize + k] = c.clone();
            }
        }
        Ok(point)
    }
}

/// Cartesian combination of alternative system lists.
fn combine(
    parts: Vec<Vec<ConstraintSystem>>,
    join: impl Fn(Vec<PolyMat>) -> PolyMat,
) -> Vec<ConstraintSystem> {
    let mut acc: Vec<(ConstraintSystem, Vec<PolyMat>)> = vec![(
        ConstraintSystem {
            leaves: Vec::new(),
            equalities: Vec::new(),
            target: PolyMat::constant(&QMat::identity(0)),
            choices: Vec::new(),
        },
        Vec::new(),
    )];
    for alts in parts {
        let mut next = Vec::with_capacity(acc.len() * alts.len());
        for (sys, targets) in &acc {
            for a in &alts {
                let mut s = sys.clone();
                let t = s.absorb(a);
                let mut ts = targets.clone();
                ts.push(t);
                next.push((s, ts));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(mut s, ts)| {
            s.target = join(ts);
            s
        })
        .collect()
}

/// One constraint system per union branch; every leaf contributes its
/// degree-`d` invariant equations on fresh variables.
pub fn compile(e: &ClosureExpr, d: u32) -> Result<Vec<ConstraintSystem>> {
    e.dim()?;
    compile_node(e, d)
}

fn compile_node(e: &ClosureExpr, d: u32) -> Result<Vec<ConstraintSystem>> {
    Ok(match e {
        ClosureExpr::GroupClosure { dim, gens } => {
            let basis = invariant_space(*dim, gens, d)?;
            vec![ConstraintSystem {
                leaves: vec![LeafVars {
                    dim: *dim,
                    offset: 0,
                }],
                equalities: basis.polys,
                target: PolyMat::unknowns(*dim, 0),
                choices: Vec::new(),
            }]
        }
        ClosureExpr::Fixed(m) => vec![ConstraintSystem::fixed(m)],
        ClosureExpr::Coset { g0, of } => {
            let c = PolyMat::constant(g0);
            compile_node(of, d)?
                .into_iter()
                .map(|mut s| {
                    s.target = c.mul(&s.target);
                    s
                })
                .collect()
        }
        ClosureExpr::Product(xs) => {
            let parts = xs.iter().map(|x| compile_node(x, d)).collect::<Result<_>>()?;
            combine(parts, |ts| {
                let mut it = ts.into_iter();
                let first = it.next().expect("nonempty product");
                it.fold(first, |a, b| a.mul(&b))
            })
        }
        ClosureExpr::Sandwich { pairs, middle } => {
            let parts = vec![compile_node(pairs, d)?, compile_node(middle, d)?];
            combine(parts, |ts| {
                let n = ts[1].dim();
                let x = ts[0].block(0, n);
                let y = ts[0].block(1, n);
                x.mul(&ts[1]).mul(&y.transpose())
            })
        }
        ClosureExpr::BlockSum(xs) => {
            let parts = xs.iter().map(|x| compile_node(x, d)).collect::<Result<_>>()?;
            combine(parts, |ts| PolyMat::block_sum(&ts))
        }
        ClosureExpr::BlockProduct { of, k, n } => compile_node(of, d)?
            .into_iter()
            .map(|mut s| {
                let mut t = s.target.block(0, *n);
                for b in 1..*k {
                    t = t.mul(&s.target.block(b, *n));
                }
                s.target = t;
                s
            })
            .collect(),
        ClosureExpr::Union(xs) => {
            let mut out = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                for mut s in compile_node(x, d)? {
                    s.choices.insert(0, i);
                    out.push(s);
                }
            }
            out
        }
        ClosureExpr::Permute { pi, of } => {
            let systems = compile_node(of, d)?;
            if let Some(s) = systems.first() {
                check_entry_permutation(pi, s.target.dim())?;
            }
            systems
                .into_iter()
                .map(|mut s| {
                    s.target = s.target.permute(pi);
                    s
                })
                .collect()
        }
    })
}

/// Concrete leaf values for one union branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub choices: Vec<usize>,
    pub leaves: Vec<QMat>,
}

/// True iff the witness satisfies every equation of its branch and the
/// branch target evaluates to `expected`.
pub fn witness_check_system(sys: &ConstraintSystem, w: &Witness, expected: &QMat) -> Result<bool> {
    let point = sys.point(&w.leaves)?;
    for p in &sys.equalities {
        if !p.eval_at(&point)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(sys.target.eval_at(&point)? == *expected)
}

/// Picks the compiled branch matching the witness's union choices.
pub fn select_system<'a>(systems: &'a [ConstraintSystem], w: &Witness) -> Result<&'a ConstraintSystem> {
    systems
        .iter()
        .find(|s| s.choices == w.choices)
        .ok_or_else(|| Error::WitnessShape(format!("no branch with choices {:?}", w.choices)))
}

pub fn witness_check(e: &ClosureExpr, d: u32, w: &Witness, expected: &QMat) -> Result<bool> {
    let systems = compile(e, d)?;
    witness_check_system(select_system(&systems, w)?, w, expected)
}

/// Witness for `w` in the expression built for `spec`; `None` when `w` is
/// not in the language.
pub fn witness_for_word(
    spec: &LanguageSpec,
    q: &QuantumAutomaton,
    w: &str,
) -> Result<Option<Witness>> {
    match spec {
        LanguageSpec::SigmaStar { alphabet } => {
            if !w.chars().all(|c| alphabet.contains(&c)) {
                return Ok(None);
            }
            Ok(Some(Witness {
                choices: Vec::new(),
                leaves: vec![phi_word(q, w)?],
            }))
        }
        LanguageSpec::Semilinear(l) => {
            let Some((ci, lambdas)) = l.coefficients(w) else {
                return Ok(None);
            };
            let c = &l.components[ci];
            let k = c.words.len();
            let mut leaf = QMat::identity(k * q.dim());
            for (lam, p) in lambdas.iter().zip(&c.periods) {
                leaf = leaf.mul(&block_power(q, &c.words, p)?.pow(*lam)?)?;
            }
            Ok(Some(Witness {
                choices: vec![ci],
                leaves: vec![leaf],
            }))
        }
        LanguageSpec::LinearCfg(g) => {
            let Some(rules) = derivation(g, w) else {
                return Ok(None);
            };
            let rules: Vec<Rule> = rules.into_iter().map(|i| g.rules[i].clone()).collect();
            let mut out = Witness {
                choices: Vec::new(),
                leaves: Vec::new(),
            };
            cfg_witness(g, q, &rules, &mut out)?;
            Ok(Some(out))
        }
    }
}

/// Splits the derivation at its last visit to the axiom: the prefix is a
/// context pair, the rule applied there selects the branch.
fn cfg_witness(g: &LinearGrammar, q: &QuantumAutomaton, rules: &[Rule], out: &mut Witness) -> Result<()> {
    let last = rules
        .iter()
        .rposition(|r| r.lhs() == g.axiom)
        .ok_or_else(|| Error::WitnessShape("derivation does not start at the axiom".into()))?;
    let (mut alpha, mut beta) = (String::new(), String::new());
    for r in &rules[..last] {
        if let Rule::Linear { u, v, .. } = r {
            alpha.push_str(u);
            beta.insert_str(0, v);
        }
    }
    let branches = decompose(g).branches;
    let bi = branches
        .iter()
        .position(|b| g.rules[b.rule] == rules[last])
        .ok_or_else(|| Error::WitnessShape("derivation leaves the grammar".into()))?;
    out.choices.push(bi);
    let gens = context_generators(&context_automaton(g, q)?)?;
    if !gens.is_empty() {
        out.leaves.push(crate::lang::context_label(q, &alpha, &beta)?);
    }
    if let Some(a) = &branches[bi].a1 {
        cfg_witness(&sub_grammar(g, a)?, q, &rules[last + 1..], out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::expr::*;
    use super::*;
    use crate::lang::{LinearComponent, SemilinearLanguage};
    use crate::ratmat::{block_sum, int, QVec};

    fn m_alpha() -> QMat {
        QMat::from_fracs(&[&[(3, 5), (4, 5)], &[(-4, 5), (3, 5)]])
    }

    fn rot90() -> QMat {
        QMat::from_ints(&[&[0, -1], &[1, 0]])
    }

    fn qfa(letters: Vec<(char, QMat)>) -> QuantumAutomaton {
        QuantumAutomaton::new(QVec::new(vec![int(1), int(0)]), letters, QMat::identity(2), int(0)).unwrap()
    }

    fn palindromes() -> LinearGrammar {
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

    #[test]
    fn builders_match_hand_constructions() {
        let q = qfa(vec![('a', rot90()), ('b', rot90().pow(2).unwrap())]);
        let e = expr_linear_cfg(&palindromes(), &q).unwrap();
        let la = block_sum(&[rot90(), rot90().transpose()]).unwrap();
        let r180 = rot90().pow(2).unwrap();
        let lb = block_sum(&[r180.clone(), r180.transpose()]).unwrap();
        assert_eq!(
            e,
            ClosureExpr::Union(vec![ClosureExpr::sandwich(
                ClosureExpr::group(4, vec![la, lb]),
                ClosureExpr::Fixed(QMat::identity(2))
            )])
        );

        let g = LinearGrammar::from_rules(&['a', 'b'], "S", vec![Rule::terminal("S", "ab")]).unwrap();
        let e = expr_linear_cfg(&g, &q).unwrap();
        assert_eq!(e, ClosureExpr::Union(vec![ClosureExpr::Fixed(rot90().pow(3).unwrap())]));

        let q1 = qfa(vec![('b', rot90())]);
        let l = SemilinearLanguage::new(
            vec!['b'],
            vec![LinearComponent::new(vec!["b".into()], vec![1], vec![vec![4]]).unwrap()],
        )
        .unwrap();
        assert_eq!(
            expr_semilinear(&l, &q1).unwrap(),
            ClosureExpr::Union(vec![ClosureExpr::block_product(
                ClosureExpr::coset(rot90(), ClosureExpr::group(2, vec![QMat::identity(2)])),
                1,
                2
            )])
        );
        let empty = SemilinearLanguage::new(vec!['b'], vec![]).unwrap();
        assert_eq!(expr_semilinear(&empty, &q1).unwrap(), ClosureExpr::Union(vec![]));
        assert_eq!(
            expr_sigma_star(&[], &q1).unwrap(),
            ClosureExpr::group(2, vec![])
        );
    }

    #[test]
    fn compile_examples() {
        let e = ClosureExpr::group(2, vec![m_alpha()]);
        let s = compile(&e, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].num_vars(), 4);
        let basis = crate::poly::SpanEchelon::from_polys(&s[0].equalities);
        let x = |i, j| Poly::var(matrix_var(2, i, j));
        for i in 0..2 {
            for j in 0..2 {
                let mut p = &(&x(0, i) * &x(0, j)) + &(&x(1, i) * &x(1, j));
                if i == j {
                    p = &p - &Poly::one();
                }
                assert!(basis.contains(&p));
            }
        }

        let s = compile(&ClosureExpr::Fixed(m_alpha()), 3).unwrap();
        assert_eq!(s[0].num_vars(), 0);
        assert_eq!(s[0].target, PolyMat::constant(&m_alpha()));

        let u = ClosureExpr::Union(vec![ClosureExpr::Fixed(m_alpha()), e.clone()]);
        let s = compile(&u, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].choices, vec![0]);
        assert_eq!(s[1].choices, vec![1]);

        let bad = ClosureExpr::Product(vec![ClosureExpr::Fixed(m_alpha()), ClosureExpr::Fixed(QMat::identity(3))]);
        assert!(matches!(compile(&bad, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn palindrome_witness() {
        let q = qfa(vec![('a', rot90()), ('b', rot90().pow(2).unwrap())]);
        let spec = LanguageSpec::LinearCfg(palindromes());
        let e = expr_linear_cfg(&palindromes(), &q).unwrap();
        let w = witness_for_word(&spec, &q, "abba").unwrap().unwrap();
        let expect_leaf = block_sum(&[phi_word(&q, "ab").unwrap(), phi_word(&q, "ba").unwrap().transpose()]).unwrap();
        assert_eq!(w.leaves, vec![expect_leaf]);
        for d in 1..=3 {
            assert!(witness_check(&e, d, &w, &phi_word(&q, "abba").unwrap()).unwrap());
        }
        assert!(witness_for_word(&spec, &q, "ab").unwrap().is_none());

        let mut bad = w.clone();
        bad.leaves[0] = QMat::from_ints(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert!(!witness_check(&e, 2, &bad, &phi_word(&q, "abba").unwrap()).unwrap());

        let ident = Witness {
            choices: vec![0],
            leaves: vec![QMat::identity(4)],
        };
        assert!(witness_check(&e, 3, &ident, &QMat::identity(2)).unwrap());
        let short = Witness {
            choices: vec![0],
            leaves: vec![],
        };
        assert!(matches!(witness_check(&e, 1, &short, &QMat::identity(2)), Err(Error::WitnessShape(_))));
    }

    #[test]
    fn nested_grammar_witness() {
        let q = qfa(vec![('a', m_alpha()), ('b', rot90())]);
        let g = LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![
                Rule::linear("S", "a", "S", "b"),
                Rule::linear("S", "b", "A", "a"),
                Rule::linear("A", "a", "A", ""),
                Rule::terminal("A", "b"),
            ],
        )
        .unwrap();
        let spec = LanguageSpec::LinearCfg(g.clone());
        let e = expr_linear_cfg(&g, &q).unwrap();
        let systems = compile(&e, 2).unwrap();
        let words = crate::lang::enumerate_words(&spec, 40, 8);
        assert!(words.contains(&"abbab".to_string()));
        for word in &words {
            let w = witness_for_word(&spec, &q, word).unwrap().unwrap();
            let sys = select_system(&systems, &w).unwrap();
            assert!(witness_check_system(sys, &w, &phi_word(&q, word).unwrap()).unwrap(), "{word}");
        }
    }

    #[test]
    fn permute_and_block_sum() {
        let e = ClosureExpr::permute(
            crate::ratmat::transpose_permutation(2),
            ClosureExpr::group(2, vec![m_alpha()]),
        );
        let w = Witness {
            choices: vec![],
            leaves: vec![m_alpha()],
        };
        assert!(witness_check(&e, 2, &w, &m_alpha().transpose()).unwrap());
        let bs = ClosureExpr::BlockSum(vec![ClosureExpr::Fixed(rot90()), ClosureExpr::group(2, vec![m_alpha()])]);
        let expect = block_sum(&[rot90(), m_alpha()]).unwrap();
        assert!(witness_check(&bs, 2, &w, &expect).unwrap());
    }
}
