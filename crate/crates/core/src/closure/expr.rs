use std::fmt;

use crate::error::{Error, Result};
use crate::lang::{
    context_automaton, context_generators, decompose, sub_grammar, LanguageSpec, LinearGrammar,
    SemilinearLanguage,
};
use crate::qfa::{phi_word, QuantumAutomaton};
use crate::ratmat::{block_sum, check_entry_permutation, is_orthogonal, QMat};

/// A tree denoting a set of matrices built from group closures.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosureExpr {
    /// Closure of the group generated by `gens` inside `O(dim)`.
    GroupClosure { dim: usize, gens: Vec<QMat> },
    Fixed(QMat),
    /// `{ g₀ X : X ∈ of }`.
    Coset { g0: QMat, of: Box<ClosureExpr> },
    /// `{ X₁ ⋯ X_k }`.
    Product(Vec<ClosureExpr>),
    /// `{ X Z Yᵀ : X ⊕ Y ∈ pairs, Z ∈ middle }`.
    Sandwich {
        pairs: Box<ClosureExpr>,
        middle: Box<ClosureExpr>,
    },
    BlockSum(Vec<ClosureExpr>),
    /// `{ X₁ ⋯ X_k : X₁ ⊕ ⋯ ⊕ X_k ∈ of }` for blocks of size `n`.
    BlockProduct {
        of: Box<ClosureExpr>,
        k: usize,
        n: usize,
    },
    Union(Vec<ClosureExpr>),
    /// Entry permutation, `pi` row-major as in [`crate::ratmat::permute_entries`].
    Permute {
        pi: Vec<(usize, usize)>,
        of: Box<ClosureExpr>,
    },
}

impl ClosureExpr {
    pub fn group(dim: usize, gens: Vec<QMat>) -> Self {
        ClosureExpr::GroupClosure { dim, gens }
    }

    pub fn coset(g0: QMat, of: ClosureExpr) -> Self {
        ClosureExpr::Coset {
            g0,
            of: Box::new(of),
        }
    }

    pub fn sandwich(pairs: ClosureExpr, middle: ClosureExpr) -> Self {
        ClosureExpr::Sandwich {
            pairs: Box::new(pairs),
            middle: Box::new(middle),
        }
    }

    pub fn block_product(of: ClosureExpr, k: usize, n: usize) -> Self {
        ClosureExpr::BlockProduct {
            of: Box::new(of),
            k,
            n,
        }
    }

    pub fn permute(pi: Vec<(usize, usize)>, of: ClosureExpr) -> Self {
        ClosureExpr::Permute { pi, of: Box::new(of) }
    }

    /// Side length of the denoted square matrices after checking every node;
    /// `None` for an empty union.
    pub fn dim(&self) -> Result<Option<usize>> {
        let mismatch = |what: &str| Err(Error::Dimension(what.to_string()));
        match self {
            ClosureExpr::GroupClosure { dim, gens } => {
                for g in gens {
                    if g.rows() != *dim || g.cols() != *dim {
                        return mismatch("group generator of wrong size");
                    }
                    if !is_orthogonal(g) {
                        return mismatch("group generator not orthogonal");
                    }
                }
                Ok(Some(*dim))
            }
            ClosureExpr::Fixed(m) => {
                if !m.is_square() {
                    return mismatch("fixed matrix not square");
                }
                Ok(Some(m.rows()))
            }
            ClosureExpr::Coset { g0, of } => match of.dim()? {
                Some(n) if g0.rows() == n && g0.cols() == n => Ok(Some(n)),
                Some(_) => mismatch("coset representative of wrong size"),
                None => Ok(None),
            },
            ClosureExpr::Product(xs) => {
                if xs.is_empty() {
                    return mismatch("empty product");
                }
                same_dims(xs)
            }
            ClosureExpr::Sandwich { pairs, middle } => match (pairs.dim()?, middle.dim()?) {
                (Some(p), Some(m)) if p == 2 * m => Ok(Some(m)),
                (Some(_), Some(_)) => mismatch("sandwich pairs must be twice the middle size"),
                _ => Ok(None),
            },
            ClosureExpr::BlockSum(xs) => {
                if xs.is_empty() {
                    return Err(Error::EmptyBlocks);
                }
                let mut total = 0;
                for x in xs {
                    match x.dim()? {
                        Some(n) => total += n,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            ClosureExpr::BlockProduct { of, k, n } => match of.dim()? {
                Some(m) if *k >= 1 && m == k * n => Ok(Some(*n)),
                Some(_) => mismatch("block product of wrong size"),
                None => Ok(None),
            },
            ClosureExpr::Union(xs) => same_dims(xs),
            ClosureExpr::Permute { pi, of } => match of.dim()? {
                Some(n) => {
                    check_entry_permutation(pi, n)?;
                    Ok(Some(n))
                }
                None => Ok(None),
            },
        }
    }

    /// Number of group-closure leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            ClosureExpr::GroupClosure { .. } => 1,
            ClosureExpr::Fixed(_) => 0,
            ClosureExpr::Coset { of, .. }
            | ClosureExpr::BlockProduct { of, .. }
            | ClosureExpr::Permute { of, .. } => of.leaf_count(),
            ClosureExpr::Sandwich { pairs, middle } => pairs.leaf_count() + middle.leaf_count(),
            ClosureExpr::Product(xs) | ClosureExpr::BlockSum(xs) | ClosureExpr::Union(xs) => {
                xs.iter().map(ClosureExpr::leaf_count).sum()
            }
        }
    }

    fn write_tree(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        let kids: Vec<&ClosureExpr> = match self {
            ClosureExpr::GroupClosure { dim, gens } => {
                writeln!(f, "{pad}GroupClosure dim={dim}")?;
                for g in gens {
                    writeln!(f, "{pad}  gen {g}")?;
                }
                return Ok(());
            }
            ClosureExpr::Fixed(m) => return writeln!(f, "{pad}Fixed {m}"),
            ClosureExpr::Coset { g0, of } => {
                writeln!(f, "{pad}Coset g0={g0}")?;
                vec![of]
            }
            ClosureExpr::Product(xs) => {
                writeln!(f, "{pad}Product")?;
                xs.iter().collect()
            }
            ClosureExpr::Sandwich { pairs, middle } => {
                writeln!(f, "{pad}Sandwich")?;
                vec![pairs, middle]
            }
            ClosureExpr::BlockSum(xs) => {
                writeln!(f, "{pad}BlockSum")?;
                xs.iter().collect()
            }
            ClosureExpr::BlockProduct { of, k, n } => {
                writeln!(f, "{pad}BlockProduct k={k} n={n}")?;
                vec![of]
            }
            ClosureExpr::Union(xs) => {
                writeln!(f, "{pad}Union ({} branches)", xs.len())?;
                xs.iter().collect()
            }
            ClosureExpr::Permute { pi, of } => {
                writeln!(f, "{pad}Permute {pi:?}")?;
                vec![of]
            }
        };
        for k in kids {
            k.write_tree(f, indent + 1)?;
        }
        Ok(())
    }
}

fn same_dims(xs: &[ClosureExpr]) -> Result<Option<usize>> {
    let mut d = None;
    for x in xs {
        if let Some(n) = x.dim()? {
            if d.is_some_and(|m| m != n) {
                return Err(Error::Dimension("operands of different sizes".into()));
            }
            d = Some(n);
        }
    }
    Ok(d)
}

impl fmt::Display for ClosureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_tree(f, 0)
    }
}

/// Closure of `φ(Σ*)`: the group generated by the letter images.
pub fn expr_sigma_star(alphabet: &[char], q: &QuantumAutomaton) -> Result<ClosureExpr> {
    let gens = alphabet
        .iter()
        .map(|&c| q.letter_matrix(c).cloned())
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosureExpr::group(q.dim(), gens))
}

/// `⊕ᵢ φ(wᵢ)^{v_i}`.
pub(crate) fn block_power(q: &QuantumAutomaton, words: &[String], v: &[u64]) -> Result<QMat> {
    let blocks = words
        .iter()
        .zip(v)
        .map(|(w, &e)| phi_word(q, w)?.pow(e))
        .collect::<Result<Vec<_>>>()?;
    block_sum(&blocks)
}

pub fn expr_semilinear(l: &SemilinearLanguage, q: &QuantumAutomaton) -> Result<ClosureExpr> {
    let n = q.dim();
    let mut branches = Vec::new();
    for c in &l.components {
        let k = c.words.len();
        let g0 = block_power(q, &c.words, &c.base)?;
        let gens = c
            .periods
            .iter()
            .map(|p| block_power(q, &c.words, p))
            .collect::<Result<Vec<_>>>()?;
        branches.push(ClosureExpr::block_product(
            ClosureExpr::coset(g0, ClosureExpr::group(k * n, gens)),
            k,
            n,
        ));
    }
    Ok(ClosureExpr::Union(branches))
}

/// Union over the axiom's branches of `Sandwich(contexts, middle)`; the
/// sandwich is left out when the axiom has no contexts besides `(ε, ε)`.
pub fn expr_linear_cfg(g: &LinearGrammar, q: &QuantumAutomaton) -> Result<ClosureExpr> {
    let ca = context_automaton(g, q)?;
    let gens = context_generators(&ca)?;
    let mut branches = Vec::new();
    for b in decompose(g).branches {
        let middle = match &b.a1 {
            None => ClosureExpr::Fixed(phi_word(q, &b.w1)?),
            Some(a) => ClosureExpr::Product(vec![
                ClosureExpr::Fixed(phi_word(q, &b.w1)?),
                expr_linear_cfg(&sub_grammar(g, a)?, q)?,
                ClosureExpr::Fixed(phi_word(q, &b.w2)?),
            ]),
        };
        branches.push(if gens.is_empty() {
            middle
        } else {
            ClosureExpr::sandwich(ClosureExpr::group(2 * q.dim(), gens.clone()), middle)
        });
    }
    Ok(ClosureExpr::Union(branches))
}

pub fn expr_for_language(spec: &LanguageSpec, q: &QuantumAutomaton) -> Result<ClosureExpr> {
    match spec {
        LanguageSpec::SigmaStar { alphabet } => expr_sigma_star(alphabet, q),
        LanguageSpec::Semilinear(l) => expr_semilinear(l, q),
        LanguageSpec::LinearCfg(g) => expr_linear_cfg(g, q),
    }
}
