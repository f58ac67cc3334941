//! Outward-rounded interval arithmetic and a best-first branch-and-bound
//! upper bound for polynomial maximization under equality constraints.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::ratmat::{fmt_rat, Rat};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::ratmat::serde_rat")]
    pub lo: Rat,
    #[serde(with = "crate::ratmat::serde_rat")]
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval with lo > hi");
        Interval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    /// `[-1, 1]`.
    pub fn unit() -> Self {
        Interval::new(-Rat::one(), Rat::one())
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &Rat) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    /// Tight power enclosure; even powers of a sign-straddling interval start at 0.
    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(Rat::one());
        }
        let pl = num_traits::pow(self.lo.clone(), k as usize);
        let ph = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 {
            Interval::new(pl, ph)
        } else if self.contains_zero() {
            Interval::new(Rat::zero(), pl.max(ph))
        } else if pl <= ph {
            Interval::new(pl, ph)
        } else {
            Interval::new(ph, pl)
        }
    }

    /// Smallest enclosing interval with endpoints on the grid `2^-bits ℤ`.
    pub fn round_out(&self, bits: u32) -> Interval {
        let scale = BigInt::one() << bits;
        let down = |x: &Rat| {
            let y = x * Rat::from_integer(scale.clone());
            Rat::new(y.numer().div_floor(y.denom()), scale.clone())
        };
        let up = |x: &Rat| {
            let y = x * Rat::from_integer(scale.clone());
            Rat::new(y.numer().div_ceil(y.denom()), scale.clone())
        };
        let lo = if self.lo.denom().is_one() { self.lo.clone() } else { down(&self.lo) };
        let hi = if self.hi.denom().is_one() { self.hi.clone() } else { up(&self.hi) };
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rat(&self.lo), fmt_rat(&self.hi))
    }
}

/// One interval per variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntBox(pub BTreeMap<Var, Interval>);

impl IntBox {
    /// `[-1, 1]` for every listed variable.
    pub fn unit_cube(vars: impl IntoIterator<Item = Var>) -> Self {
        IntBox(vars.into_iter().map(|v| (v, Interval::unit())).collect())
    }

    pub fn get(&self, v: Var) -> Option<&Interval> {
        self.0.get(&v)
    }

    pub fn max_width(&self) -> Rat {
        self.0
            .values()
            .map(Interval::width)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn contains(&self, point: &BTreeMap<Var, Rat>) -> bool {
        self.0
            .iter()
            .all(|(v, iv)| point.get(v).is_some_and(|x| iv.contains(x)))
    }

    fn split(&self, v: Var) -> (IntBox, IntBox) {
        let iv = &self.0[&v];
        let m = iv.midpoint();
        let mut a = self.clone();
        let mut b = self.clone();
        a.0.insert(v, Interval::new(iv.lo.clone(), m.clone()));
        b.0.insert(v, Interval::new(m, iv.hi.clone()));
        (a, b)
    }
}

const BASE_BITS: u32 = 32;

/// Enclosure of `p` over `b`, with dyadic outward rounding at `2^-bits`.
pub fn interval_eval_bits(p: &Poly, b: &IntBox, bits: u32) -> Result<Interval> {
    let mut acc = Interval::point(Rat::zero());
    for (m, c) in p.terms() {
        let mut t = Interval::point(Rat::one());
        for &(v, k) in m.exponents() {
            let iv = b
                .get(v)
                .ok_or_else(|| Error::Dimension(format!("variable {v} not covered by box")))?;
            t = t.mul(&iv.pow(k)).round_out(bits);
        }
        acc = acc.add(&t.scale(c).round_out(bits));
    }
    Ok(acc)
}

/// Enclosure of `p` over `b` at the base precision.
pub fn interval_eval(p: &Poly, b: &IntBox) -> Result<Interval> {
    interval_eval_bits(p, b, BASE_BITS)
}

/// Limits for [`bb_sup_bound`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbBudget {
    pub max_nodes: usize,
    /// Boxes narrower than this are not split further.
    pub min_width: Rat,
    /// Boxes whose objective enclosure is narrower than this are resolved.
    pub tolerance: Rat,
    /// Stop as soon as the bound is known to be at most this value.
    pub target: Option<Rat>,
}

impl Default for BbBudget {
    fn default() -> Self {
        BbBudget {
            max_nodes: 20_000,
            min_width: Rat::new(BigInt::one(), BigInt::one() << 12),
            tolerance: Rat::new(BigInt::one(), BigInt::one() << 12),
            target: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BbStatus {
    Certified,
    BudgetExhausted,
    /// A feasible point with objective above the target was found.
    TargetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupBound {
    /// Upper bound on the supremum; `None` stands for `-∞` (nothing feasible).
    pub bound: Option<Rat>,
    pub status: BbStatus,
    pub nodes: usize,
}

struct Node {
    ub: Rat,
    lb: Rat,
    depth: u32,
    b: IntBox,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        // shallower first on ties keeps the search order deterministic and broad
        self.ub.cmp(&o.ub).then(o.depth.cmp(&self.depth))
    }
}

fn bits_for(depth: u32) -> u32 {
    let mut bits = BASE_BITS;
    while bits / 2 < depth + 8 {
        bits *= 2;
    }
    bits
}

fn max_opt(a: Option<Rat>, b: Rat) -> Option<Rat> {
    Some(match a {
        Some(a) if a >= b => a,
        _ => b,
    })
}

/// Certified upper bound of `sup { objective(x) : x ∈ region, constraints(x) = 0 }`.
///
/// Boxes are explored best-first by objective upper bound. A box is dropped
/// when some constraint enclosure excludes 0 and resolved once it is narrow
/// enough, its objective enclosure is tight, or it falls below the target.
/// The returned bound is the maximum over resolved and unexplored boxes, so it
/// stays sound when the node budget runs out.
pub fn bb_sup_bound(
    objective: &Poly,
    constraints: &[Poly],
    region: &IntBox,
    budget: &BbBudget,
) -> Result<SupBound> {
    let assess = |b: IntBox, depth: u32| -> Result<Option<Node>> {
        let bits = bits_for(depth);
        for c in constraints {
            if !interval_eval_bits(c, &b, bits)?.contains_zero() {
                return Ok(None);
            }
        }
        let iv = interval_eval_bits(objective, &b, bits)?;
        Ok(Some(Node {
            ub: iv.hi,
            lb: iv.lo,
            depth,
            b,
        }))
    };

    // Box midpoint, if it satisfies every constraint exactly.
    let width = region.0.keys().next_back().map_or(0, |v| *v as usize + 1);
    let feasible_value = |b: &IntBox| -> Result<Option<Rat>> {
        let mut point = vec![Rat::zero(); width];
        for (v, iv) in &b.0 {
            point[*v as usize] = iv.midpoint();
        }
        for c in constraints {
            if !c.eval_at(&point)?.is_zero() {
                return Ok(None);
            }
        }
        objective.eval_at(&point).map(Some)
    };

    let mut heap = BinaryHeap::new();
    if let Some(n) = assess(region.clone(), 0)? {
        heap.push(n);
    }
    let mut resolved: Option<Rat> = None;
    let mut nodes = 0usize;
    while let Some(node) = heap.pop() {
        if let Some(t) = &budget.target {
            if node.ub <= *t {
                // every remaining box is at most this one
                return Ok(SupBound {
                    bound: max_opt(resolved, node.ub),
                    status: BbStatus::Certified,
                    nodes,
                });
            }
            if feasible_value(&node.b)?.is_some_and(|v| v > *t) {
                return Ok(SupBound {
                    bound: max_opt(resolved, node.ub),
                    status: BbStatus::TargetExceeded,
                    nodes,
                });
            }
        }
        let splittable = node
            .b
            .0
            .iter()
            .filter(|(_, iv)| iv.width() > budget.min_width)
            .max_by(|a, b| a.1.width().cmp(&b.1.width()).then(b.0.cmp(a.0)))
            .map(|(v, _)| *v);
        let tight = &node.ub - &node.lb <= budget.tolerance;
        let Some(v) = splittable.filter(|_| !tight) else {
            resolved = max_opt(resolved, node.ub);
            continue;
        };
        if nodes >= budget.max_nodes {
            let bound = max_opt(resolved, node.ub);
            return Ok(SupBound {
                bound,
                status: BbStatus::BudgetExhausted,
                nodes,
            });
        }
        nodes += 1;
        let (a, b) = node.b.split(v);
        for child in [a, b] {
            if let Some(n) = assess(child, node.depth + 1)? {
                heap.push(n);
            }
        }
    }
    Ok(SupBound {
        bound: resolved,
        status: BbStatus::Certified,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::matrix_var;
    use crate::ratmat::{int, rat};

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(int(a), int(b))
    }

    #[test]
    fn enclosures() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let b = IntBox([(0, iv(0, 1)), (1, iv(0, 1))].into());
        assert_eq!(interval_eval(&x, &b).unwrap(), iv(0, 1));
        assert_eq!(interval_eval(&(&x + &y), &b).unwrap(), iv(0, 2));
        let c = IntBox::unit_cube([0]);
        let sq = interval_eval(&x.pow(2), &c).unwrap();
        assert!(sq.lo <= int(0) && sq.hi >= int(1));
        assert!(interval_eval(&y, &c).is_err());
    }

    #[test]
    fn rounding_is_outward() {
        let third = Interval::point(rat(1, 3)).round_out(8);
        assert!(third.contains(&rat(1, 3)));
        assert!(third.width() <= rat(1, 256));
        assert_eq!(third.lo, rat(85, 256));
    }

    fn orthogonality(n: usize) -> Vec<Poly> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut p = Poly::zero();
                for k in 0..n {
                    p = &p + &(&Poly::var(matrix_var(n, k, i)) * &Poly::var(matrix_var(n, k, j)));
                }
                if i == j {
                    p = &p - &Poly::one();
                }
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn circle_group_sup() {
        let obj = Poly::var(matrix_var(2, 0, 0)).pow(2);
        let region = IntBox::unit_cube(0..4);
        let budget = BbBudget {
            target: Some(&int(1) + &rat(1, 1024)),
            ..BbBudget::default()
        };
        let r = bb_sup_bound(&obj, &orthogonality(2), &region, &budget).unwrap();
        let b = r.bound.unwrap();
        assert!(b >= int(1) && b <= &int(1) + &rat(1, 1024));
        assert_eq!(r.status, BbStatus::Certified);
    }

    #[test]
    fn zero_objective_and_empty_region() {
        let region = IntBox::unit_cube(0..4);
        let r = bb_sup_bound(&Poly::zero(), &orthogonality(2), &region, &BbBudget::default()).unwrap();
        assert_eq!(r.bound, Some(int(0)));
        assert_eq!(r.status, BbStatus::Certified);

        let x = Poly::var(0);
        let r = bb_sup_bound(
            &x,
            &[&x - &Poly::constant(int(2))],
            &IntBox::unit_cube([0]),
            &BbBudget::default(),
        )
        .unwrap();
        assert_eq!(r.bound, None);
        assert_eq!(r.status, BbStatus::Certified);
    }

    #[test]
    fn pruning_tightens_bound() {
        // x maximized on the circle x² + y² = 1/4 inside [-1,1]²
        let x = Poly::var(0);
        let y = Poly::var(1);
        let c = &(&x.pow(2) + &y.pow(2)) - &Poly::constant(rat(1, 4));
        let budget = BbBudget {
            max_nodes: 4000,
            min_width: rat(1, 64),
            ..BbBudget::default()
        };
        let r = bb_sup_bound(&x, &[c], &IntBox::unit_cube([0, 1]), &budget).unwrap();
        let b = r.bound.unwrap();
        assert!(b >= rat(1, 2) && b < rat(3, 4), "{b}");
    }

    #[test]
    fn feasible_point_above_target_stops_search() {
        let x = Poly::var(0);
        let budget = BbBudget {
            target: Some(rat(1, 2)),
            ..BbBudget::default()
        };
        let r = bb_sup_bound(&(&x.pow(2) + &Poly::one()), &[], &IntBox::unit_cube([0]), &budget).unwrap();
        assert_eq!(r.status, BbStatus::TargetExceeded);
        assert_eq!(r.nodes, 0);
    }
}
