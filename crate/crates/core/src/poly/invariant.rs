//! Polynomials `p` with `p(I) = 0` and `p(gX) = p(X)` for every generator `g`.
//!
//! The common zeros of these polynomials, over all degrees, form the closure of
//! the group generated by the `g`s. Truncating at a degree bound gives a
//! superset of that closure, and the supersets shrink as the degree grows.
//!
//! `X ↦ gX` is linear and mixes only entries within one column and within one
//! connected component of rows (rows `i`, `k` are linked when some generator
//! has a nonzero `g[i][k]`). The substitution therefore preserves the
//! multidegree over those variable groups, and the invariance system splits
//! into one small kernel problem per multidegree. A polynomial vanishing at
//! `I` is `f - f(I)` for `f` a sum of homogeneous invariants of positive
//! degree, so the basis is assembled from the homogeneous pieces.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use super::linalg::{kernel_with_width, SpanEchelon};
use super::{left_mul_forms, matrix_var, Monomial, Poly, Var};
use crate::error::{Error, Result};
use crate::ratmat::{QMat, QVec, Rat};

/// Basis of the invariant polynomials of total degree at most `degree` for
/// `dim x dim` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBasis {
    pub degree: u32,
    pub dim: usize,
    pub polys: Vec<Poly>,
}

impl PolyBasis {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Whether `p` lies in the linear span of the basis.
    pub fn spans(&self, p: &Poly) -> bool {
        SpanEchelon::from_polys(&self.polys).contains(p)
    }

    /// Whether every basis polynomial vanishes at `m`.
    pub fn vanishes_at(&self, m: &QMat) -> Result<bool> {
        for p in &self.polys {
            if !super::eval(p, m)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

type CacheKey = (Vec<QMat>, usize, u32);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Vec<Poly>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Vec<Poly>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Drops every memoized homogeneous basis.
pub fn clear_invariant_cache() {
    cache().lock().unwrap_or_else(|e| e.into_inner()).clear();
}

fn check_gens(dim: usize, gens: &[QMat]) -> Result<Vec<QMat>> {
    for g in gens {
        if g.rows() != dim || g.cols() != dim {
            return Err(Error::Dimension(format!(
                "generator is {}x{}, expected {dim}x{dim}",
                g.rows(),
                g.cols()
            )));
        }
    }
    let mut effective: Vec<QMat> = Vec::new();
    for g in gens {
        if !g.is_identity() && !effective.contains(g) {
            effective.push(g.clone());
        }
    }
    Ok(effective)
}

/// Basis of the homogeneous degree-`k` polynomials invariant under `X ↦ gX`
/// for every generator. Results are memoized per generator set and degree.
pub fn homogeneous_invariants(dim: usize, gens: &[QMat], k: u32) -> Result<Arc<Vec<Poly>>> {
    let gens = check_gens(dim, gens)?;
    let key = (gens, dim, k);
    if let Some(hit) = cache().lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(Arc::clone(hit));
    }
    let computed = Arc::new(compute_homogeneous(dim, &key.0, k));
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    Ok(Arc::clone(guard.entry(key).or_insert(computed)))
}

/// Invariant polynomials of total degree `≤ d` that vanish at the identity.
pub fn invariant_space(dim: usize, gens: &[QMat], d: u32) -> Result<PolyBasis> {
    let identity = QMat::identity(dim);
    let mut polys = Vec::new();
    for k in 1..=d {
        for f in homogeneous_invariants(dim, gens, k)?.iter() {
            let at_identity = f.eval_at(identity.entries())?;
            polys.push(f - &Poly::constant(at_identity));
        }
    }
    Ok(PolyBasis {
        degree: d,
        dim,
        polys,
    })
}

fn variable_groups(dim: usize, gens: &[QMat]) -> Vec<Vec<Var>> {
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for g in gens {
        for i in 0..dim {
            for k in 0..dim {
                if i != k && !g[(i, k)].is_zero() {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for i in 0..dim {
        let r = find(&mut parent, i);
        let slot = *index.entry(r).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[slot].push(i);
    }
    let mut groups = Vec::new();
    for j in 0..dim {
        for comp in &components {
            groups.push(comp.iter().map(|&i| matrix_var(dim, i, j)).collect());
        }
    }
    groups
}

/// All ways to write `k` as an ordered sum of `parts` nonnegative integers.
fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(k: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(k);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=k).rev() {
            cur.push(a);
            rec(k - a, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(k, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Monomials of exact degree `a` in the given variables.
fn monomials_of_degree(vars: &[Var], a: u32) -> Vec<Monomial> {
    compositions(a, vars.len())
        .into_iter()
        .map(|exps| Monomial::from_pairs(vars.iter().copied().zip(exps)))
        .collect()
}

fn compute_homogeneous(dim: usize, gens: &[QMat], k: u32) -> Vec<Poly> {
    let groups = variable_groups(dim, gens);
    let forms: Vec<Vec<Poly>> = gens.iter().map(left_mul_forms).collect();
    let mut out = Vec::new();
    for degrees in compositions(k, groups.len()) {
        let mut block = vec![Monomial::one()];
        for (vars, &a) in groups.iter().zip(&degrees) {
            if a == 0 {
                continue;
            }
            let part = monomials_of_degree(vars, a);
            block = block
                .iter()
                .flat_map(|m| part.iter().map(move |q| m.mul(q)))
                .collect();
        }
        block.sort();
        if gens.is_empty() {
            out.extend(block.into_iter().map(|m| Poly::term(m, Rat::from_integer(1.into()))));
            continue;
        }
        out.extend(block_invariants(&block, &forms));
    }
    out
}

fn block_invariants(block: &[Monomial], forms: &[Vec<Poly>]) -> Vec<Poly> {
    let width = block.len();
    let index: HashMap<&Monomial, usize> = block.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<QVec> = Vec::with_capacity(width * forms.len());
    for form in forms {
        // column c holds the coefficients of block[c](gX) - block[c](X)
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(width);
        for (c, m) in block.iter().enumerate() {
            let image = Poly::term(m.clone(), Rat::from_integer(1.into()))
                .substitute(|v| form[v as usize].clone());
            let mut col = vec![Rat::zero(); width];
            for (mono, coef) in image.terms() {
                let r = index[mono];
                col[r] += coef;
            }
            col[c] -= Rat::from_integer(1.into());
            cols.push(col);
        }
        for r in 0..width {
            let row: Vec<Rat> = cols.iter().map(|col| col[r].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(QVec(row));
            }
        }
    }
    kernel_with_width(&rows, width)
        .into_iter()
        .map(|v| {
            Poly::from_terms(block.iter().cloned().zip(v.0)).primitive()
        })
        .collect()
}
