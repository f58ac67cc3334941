//! Buchberger's algorithm over ℚ with the Gebauer–Möller pair criteria.
//!
//! Polynomials are converted to a dense exponent representation over the
//! variables that actually occur, with terms kept in ascending monomial order
//! so the leading term is the last element.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, Var};
use crate::ratmat::Rat;

/// Monomial orders available to [`buchberger`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Lexicographic, smaller variable index ranks higher.
    Lex,
    /// Graded reverse lexicographic.
    GrevLex,
    /// Product order: grevlex on the first `n` variables (in the dense
    /// numbering), ties broken by grevlex on the rest. Eliminates the first
    /// block.
    Block(usize),
}

/// Hard resource caps for one Gröbner computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBudget {
    pub max_basis: usize,
    pub max_degree: u32,
    /// S-polynomial reductions.
    pub max_steps: usize,
    /// Terms in any intermediate polynomial.
    pub max_terms: usize,
}

impl Default for GroebnerBudget {
    fn default() -> Self {
        GroebnerBudget {
            max_basis: 300,
            max_degree: 12,
            max_steps: 4000,
            max_terms: 20_000,
        }
    }
}

type Exp = Box<[u16]>;

fn degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

fn grevlex(a: &[u16], b: &[u16]) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    fn cmp(self, a: &[u16], b: &[u16]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Block(k) => {
                let k = k.min(a.len());
                grevlex(&a[..k], &b[..k]).then_with(|| grevlex(&a[k..], &b[k..]))
            }
        }
    }
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Dense polynomial, terms ascending in the active order.
#[derive(Clone, Debug, PartialEq)]
struct DPoly {
    terms: Vec<(Exp, Rat)>,
}

impl DPoly {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &[u16] {
        &self.terms.last().expect("nonzero").0
    }

    fn lc(&self) -> &Rat {
        &self.terms.last().expect("nonzero").1
    }

    fn make_monic(&mut self) {
        let inv = self.lc().recip();
        if !inv.is_one() {
            for (_, c) in &mut self.terms {
                *c *= &inv;
            }
        }
    }

    fn max_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| degree(e)).max().unwrap_or(0)
    }

    /// `self - coef * x^shift * other`.
    fn sub_scaled(&self, coef: &Rat, shift: &[u16], other: &DPoly, order: MonomialOrder) -> DPoly {
        let shifted = other.terms.iter().map(|(e, c)| {
            let e: Exp = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            (e, -(c * coef))
        });
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (Some(x), Some(y)) => order.cmp(&x.0, &y.0),
            };
            match ord {
                Ordering::Less => out.push(a.next().unwrap()),
                Ordering::Greater => out.push(b.next().unwrap()),
                Ordering::Equal => {
                    let (e, c1) = a.next().unwrap();
                    let (_, c2) = b.next().unwrap();
                    let c = c1 + c2;
                    if !c.is_zero() {
                        out.push((e, c));
                    }
                }
            }
        }
        DPoly { terms: out }
    }
}

/// Full reduction of `p` by `basis` (all monic).
fn reduce(
    p: DPoly,
    basis: &[&DPoly],
    order: MonomialOrder,
    max_terms: usize,
) -> Result<DPoly> {
    let mut p = p;
    let mut rem: Vec<(Exp, Rat)> = Vec::new();
    while let Some((m, c)) = p.terms.last().cloned() {
        match basis.iter().find(|g| divides(g.lm(), &m)) {
            Some(g) => {
                let shift: Vec<u16> = m.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
                p = p.sub_scaled(&c, &shift, g, order);
                if p.terms.len() > max_terms {
                    return Err(Error::Budget(format!(
                        "intermediate polynomial exceeds {max_terms} terms"
                    )));
                }
            }
            None => {
                rem.push(p.terms.pop().unwrap());
            }
        }
    }
    rem.reverse();
    Ok(DPoly { terms: rem })
}

fn s_poly(f: &DPoly, g: &DPoly, order: MonomialOrder) -> DPoly {
    let l = lcm(f.lm(), g.lm());
    let sf: Vec<u16> = l.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
    let sg: Vec<u16> = l.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
    let zero = DPoly { terms: Vec::new() };
    let a = zero.sub_scaled(&-Rat::one(), &sf, f, order);
    a.sub_scaled(&Rat::one(), &sg, g, order)
}

/// Variable numbering shared between sparse [`Poly`] and the dense form.
#[derive(Clone, Debug, PartialEq, Eq)]
struct VarMap {
    vars: Vec<Var>,
    index: BTreeMap<Var, usize>,
}

impl VarMap {
    fn new(vars: Vec<Var>) -> Self {
        let index = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        VarMap { vars, index }
    }

    fn to_dense(&self, p: &Poly, order: MonomialOrder) -> DPoly {
        let n = self.vars.len();
        let mut terms: Vec<(Exp, Rat)> = p
            .terms()
            .map(|(m, c)| {
                let mut e = vec![0u16; n];
                for &(v, k) in m.exponents() {
                    e[self.index[&v]] = k as u16;
                }
                (e.into_boxed_slice(), c.clone())
            })
            .collect();
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        DPoly { terms }
    }

    fn to_sparse(&self, p: &DPoly) -> Poly {
        Poly::from_terms(p.terms.iter().map(|(e, c)| {
            let m = Monomial::from_pairs(
                e.iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (self.vars[i], k as u32)),
            );
            (m, c.clone())
        }))
    }
}

/// A reduced Gröbner basis together with the order it was computed for.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    map: VarMap,
    order: MonomialOrder,
    polys: Vec<DPoly>,
    /// S-polynomial reductions performed.
    pub steps: usize,
}

impl GroebnerBasis {
    /// Basis elements, leading monomials ascending.
    pub fn polys(&self) -> Vec<Poly> {
        self.polys.iter().map(|p| self.map.to_sparse(p)).collect()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// The ideal contains 1.
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].terms.len() == 1 && degree(self.polys[0].lm()) == 0
    }

    /// Unique remainder of `p` modulo the ideal.
    pub fn normal_form(&self, p: &Poly, budget: &GroebnerBudget) -> Result<Poly> {
        let extra: BTreeSet<Var> = p
            .vars()
            .into_iter()
            .filter(|v| !self.map.index.contains_key(v))
            .collect();
        // Variables outside the ideal are appended at the end of the dense
        // numbering; they never occur in a leading monomial of the basis.
        let (map, basis) = if extra.is_empty() {
            (self.map.clone(), self.polys.clone())
        } else {
            let mut vars = self.map.vars.clone();
            vars.extend(extra.iter().copied());
            let map = VarMap::new(vars);
            let pad = extra.len();
            let basis = self
                .polys
                .iter()
                .map(|q| {
                    let mut terms: Vec<(Exp, Rat)> = q
                        .terms
                        .iter()
                        .map(|(e, c)| {
                            let mut v = e.to_vec();
                            v.extend(std::iter::repeat_n(0, pad));
                            (v.into_boxed_slice(), c.clone())
                        })
                        .collect();
                    terms.sort_by(|a, b| self.order.cmp(&a.0, &b.0));
                    DPoly { terms }
                })
                .collect();
            (map, basis)
        };
        let refs: Vec<&DPoly> = basis.iter().collect();
        let r = reduce(map.to_dense(p, self.order), &refs, self.order, budget.max_terms)?;
        Ok(map.to_sparse(&r))
    }

    /// Basis elements that involve only variables from `keep`.
    pub fn restricted_to(&self, keep: &BTreeSet<Var>) -> Vec<Poly> {
        self.polys()
            .into_iter()
            .filter(|p| p.vars().is_subset(keep))
            .collect()
    }
}

fn run_buchberger(
    inputs: Vec<DPoly>,
    order: MonomialOrder,
    budget: &GroebnerBudget,
) -> Result<(Vec<DPoly>, usize)> {
    let mut g: Vec<DPoly> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let unit = |n: usize| DPoly {
        terms: vec![(vec![0u16; n].into_boxed_slice(), Rat::one())],
    };
    let nvars = inputs.first().map_or(0, |p| p.terms[0].0.len());

    let add = |h: DPoly,
                   g: &mut Vec<DPoly>,
                   active: &mut Vec<bool>,
                   pairs: &mut Vec<(usize, usize)>|
     -> Result<bool> {
        if degree(h.lm()) == 0 {
            return Ok(true);
        }
        if h.max_degree() > budget.max_degree {
            return Err(Error::Budget(format!(
                "basis element of degree {} exceeds cap {}",
                h.max_degree(),
                budget.max_degree
            )));
        }
        if g.len() >= budget.max_basis {
            return Err(Error::Budget(format!("basis size exceeds {}", budget.max_basis)));
        }
        update(g, active, pairs, h);
        Ok(false)
    };

    for f in inputs {
        let refs: Vec<&DPoly> = g.iter().zip(&active).filter(|(_, a)| **a).map(|(p, _)| p).collect();
        let mut h = reduce(f, &refs, order, budget.max_terms)?;
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if add(h, &mut g, &mut active, &mut pairs)? {
            return Ok((vec![unit(nvars)], 0));
        }
    }

    let mut steps = 0usize;
    while !pairs.is_empty() {
        // normal selection strategy: smallest lcm first
        let (k, _) = pairs
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| (k, lcm(g[i].lm(), g[j].lm())))
            .min_by(|a, b| order.cmp(&a.1, &b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        let (i, j) = pairs.swap_remove(k);
        steps += 1;
        if steps > budget.max_steps {
            return Err(Error::Budget(format!("more than {} pair reductions", budget.max_steps)));
        }
        let s = s_poly(&g[i], &g[j], order);
        let refs: Vec<&DPoly> = g.iter().zip(&active).filter(|(_, a)| **a).map(|(p, _)| p).collect();
        let mut h = reduce(s, &refs, order, budget.max_terms)?;
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if add(h, &mut g, &mut active, &mut pairs)? {
            return Ok((vec![unit(nvars)], steps));
        }
    }

    // minimal, then reduced
    let mut basis: Vec<DPoly> = g
        .into_iter()
        .zip(active)
        .filter(|(_, a)| *a)
        .map(|(p, _)| p)
        .collect();
    basis.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    let mut minimal: Vec<DPoly> = Vec::new();
    for p in basis {
        if !minimal.iter().any(|q| divides(q.lm(), p.lm())) {
            minimal.retain(|q| !divides(p.lm(), q.lm()));
            minimal.push(p);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<&DPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, p)| p)
            .collect();
        let lead = minimal[k].terms.last().cloned().unwrap();
        let mut tail = minimal[k].clone();
        tail.terms.pop();
        let mut r = reduce(tail, &others, order, budget.max_terms)?;
        r.terms.push(lead);
        reduced.push(r);
    }
    reduced.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    Ok((reduced, steps))
}

/// Gebauer–Möller update with new element `h`.
fn update(g: &mut Vec<DPoly>, active: &mut Vec<bool>, pairs: &mut Vec<(usize, usize)>, h: DPoly) {
    let hi = g.len();
    let lh: Exp = h.lm().into();
    g.push(h);
    active.push(false);
    let current: Vec<usize> = (0..hi).filter(|&j| active[j]).collect();

    let mut candidates = current.clone();
    let mut kept: Vec<usize> = Vec::new();
    while let Some(j) = candidates.pop() {
        let l = lcm(&lh, g[j].lm());
        let dominated = candidates
            .iter()
            .chain(kept.iter())
            .any(|&k| divides(&lcm(&lh, g[k].lm()), &l));
        if coprime(&lh, g[j].lm()) || !dominated {
            kept.push(j);
        }
    }
    kept.retain(|&j| !coprime(&lh, g[j].lm()));

    pairs.retain(|&(a, b)| {
        let l = lcm(g[a].lm(), g[b].lm());
        !(divides(&lh, &l) && *lcm(g[a].lm(), &lh) != *l && *lcm(g[b].lm(), &lh) != *l)
    });
    pairs.extend(kept.into_iter().map(|j| (j, hi)));

    for j in current {
        if divides(&lh, g[j].lm()) {
            active[j] = false;
        }
    }
    active[hi] = true;
}

fn all_vars(gens: &[Poly]) -> BTreeSet<Var> {
    gens.iter().flat_map(|p| p.vars()).collect()
}

fn compute(
    gens: &[Poly],
    vars: Vec<Var>,
    order: MonomialOrder,
    budget: &GroebnerBudget,
) -> Result<GroebnerBasis> {
    let map = VarMap::new(vars);
    let inputs: Vec<DPoly> = gens
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| map.to_dense(p, order))
        .collect();
    let (polys, steps) = if inputs.is_empty() {
        (Vec::new(), 0)
    } else {
        run_buchberger(inputs, order, budget)?
    };
    Ok(GroebnerBasis {
        map,
        order,
        polys,
        steps,
    })
}

/// Reduced, monic Gröbner basis of the ideal generated by `gens`.
///
/// Variables are numbered densely in increasing index order, so under
/// [`MonomialOrder::Lex`] a smaller variable index ranks higher.
pub fn buchberger(
    gens: &[Poly],
    order: MonomialOrder,
    budget: &GroebnerBudget,
) -> Result<GroebnerBasis> {
    compute(gens, all_vars(gens).into_iter().collect(), order, budget)
}

/// Generators of the elimination ideal `⟨gens⟩ ∩ ℚ[keep]`.
pub fn eliminate(gens: &[Poly], keep: &BTreeSet<Var>, budget: &GroebnerBudget) -> Result<Vec<Poly>> {
    Ok(elimination_basis(gens, keep, budget)?.restricted_to(keep))
}

/// Gröbner basis in a block order placing every variable outside `keep`
/// before the variables of `keep`.
pub fn elimination_basis(
    gens: &[Poly],
    keep: &BTreeSet<Var>,
    budget: &GroebnerBudget,
) -> Result<GroebnerBasis> {
    let present = all_vars(gens);
    let elim: Vec<Var> = present.iter().copied().filter(|v| !keep.contains(v)).collect();
    let kept: Vec<Var> = present.iter().copied().filter(|v| keep.contains(v)).collect();
    let split = elim.len();
    let mut vars = elim;
    vars.extend(kept);
    compute(gens, vars, MonomialOrder::Block(split), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::int;

    fn v(i: Var) -> Poly {
        Poly::var(i)
    }

    fn c(n: i64) -> Poly {
        Poly::constant(int(n))
    }

    #[test]
    fn lex_square_root_of_two() {
        // x = var 0, t = var 1; lex with x > t
        let gens = vec![&v(0).pow(2) - &c(2), &v(1) - &v(0)];
        let gb = buchberger(&gens, MonomialOrder::Lex, &GroebnerBudget::default()).unwrap();
        let t2 = &v(1).pow(2) - &c(2);
        assert!(gb.polys().contains(&t2));
        assert!(gb.polys().contains(&(&v(0) - &v(1))));
    }

    #[test]
    fn trivial_cases() {
        let b = GroebnerBudget::default();
        let p = &v(0) - &c(1);
        let gb = buchberger(std::slice::from_ref(&p), MonomialOrder::GrevLex, &b).unwrap();
        assert_eq!(gb.polys(), vec![p]);
        let gb = buchberger(&[v(0), &v(0) + &c(1)], MonomialOrder::GrevLex, &b).unwrap();
        assert!(gb.is_unit());
        assert_eq!(gb.polys(), vec![c(1)]);
    }

    #[test]
    fn generators_reduce_to_zero() {
        let b = GroebnerBudget::default();
        let (x, y, z) = (v(0), v(1), v(2));
        let gens = vec![
            &(&x * &x) + &(&(&y * &z) - &c(1)),
            &(&x * &y) - &z,
            &(&y * &y) - &(&x * &z),
        ];
        for order in [MonomialOrder::GrevLex, MonomialOrder::Lex, MonomialOrder::Block(1)] {
            let gb = buchberger(&gens, order, &b).unwrap();
            for g in &gens {
                assert!(gb.normal_form(g, &b).unwrap().is_zero(), "{order:?}");
            }
        }
    }

    #[test]
    fn eliminations() {
        let b = GroebnerBudget::default();
        let (x, t) = (v(0), v(1));
        let keep: BTreeSet<Var> = [1].into();
        let e = eliminate(&[&x.pow(2) - &c(2), &t - &x], &keep, &b).unwrap();
        assert_eq!(e, vec![&t.pow(2) - &c(2)]);

        let y = v(2);
        let e = eliminate(&[&(&x.pow(2) + &y.pow(2)) - &c(1), &t - &x], &keep, &b).unwrap();
        assert!(e.is_empty());

        let e = eliminate(&[&t - &c(5)], &keep, &b).unwrap();
        assert_eq!(e, vec![&t - &c(5)]);
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = GroebnerBudget {
            max_steps: 0,
            ..GroebnerBudget::default()
        };
        let gens = vec![&v(0).pow(2) - &v(1), &(&v(0) * &v(1)) - &c(1)];
        assert!(matches!(
            buchberger(&gens, MonomialOrder::GrevLex, &tiny),
            Err(Error::Budget(_))
        ));
    }
}
