use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{BudgetReport, DecideConfig};
use crate::closure::ConstraintSystem;
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::qfa::QuantumAutomaton;
use crate::ratmat::Rat;
use crate::realalg::{
    bb_sup_bound, buchberger, elimination_basis, max_real_root_leq, BbBudget, BbStatus, GroebnerBudget,
    IntBox, MonomialOrder, UniPoly,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checker {
    Ideal,
    Elim,
    Bb,
}

/// Why a branch never exceeds the threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// The objective reduces to this constant modulo the ideal.
    Ideal {
        #[serde(with = "crate::ratmat::serde_rat")]
        constant: Rat,
    },
    /// The equalities generate the unit ideal: the branch denotes nothing.
    Infeasible,
    /// Every objective value on the variety is a root of this polynomial.
    Elim { poly: UniPoly },
    /// Certified upper bound over the unit cube; absent when no box survives.
    Bb {
        #[serde(default, with = "super::opt_rat")]
        bound: Option<Rat>,
    },
}

/// `‖s X P‖²` with `X` the system's target.
pub fn objective(q: &QuantumAutomaton, sys: &ConstraintSystem) -> Result<Poly> {
    let n = q.dim();
    if sys.target.dim() != n {
        return Err(Error::Dimension(format!(
            "target is {0}x{0}, automaton has dimension {n}",
            sys.target.dim()
        )));
    }
    let sx: Vec<Poly> = (0..n)
        .map(|j| {
            let mut acc = Poly::zero();
            for i in 0..n {
                if !q.s.0[i].is_zero() {
                    acc = &acc + &sys.target.entry(i, j).scale(&q.s.0[i]);
                }
            }
            acc
        })
        .collect();
    let mut out = Poly::zero();
    for j in 0..n {
        let mut c = Poly::zero();
        for (k, p) in sx.iter().enumerate() {
            let w = &q.projection[(k, j)];
            if !w.is_zero() {
                c = &c + &p.scale(w);
            }
        }
        out = &out + &(&c * &c);
    }
    Ok(out)
}

/// All equalities, or only those whose variables occur in the objective.
/// Dropping equalities enlarges the set and keeps every checker sound.
pub(crate) fn equalities_for(sys: &ConstraintSystem, obj: &Poly, restricted: bool) -> Vec<Poly> {
    if !restricted {
        return sys.equalities.clone();
    }
    let vars = obj.vars();
    sys.equalities
        .iter()
        .filter(|p| p.vars().is_subset(&vars))
        .cloned()
        .collect()
}

pub(crate) fn ideal_evidence(
    eqs: &[Poly],
    obj: &Poly,
    lam_sq: &Rat,
    budget: &GroebnerBudget,
    report: &mut BudgetReport,
) -> Result<Option<Evidence>> {
    let gb = buchberger(eqs, MonomialOrder::GrevLex, budget)?;
    report.groebner_steps += gb.steps;
    if gb.is_unit() {
        return Ok(Some(Evidence::Infeasible));
    }
    let nf = gb.normal_form(obj, budget)?;
    Ok(nf
        .as_constant()
        .filter(|c| c <= lam_sq)
        .map(|constant| Evidence::Ideal { constant }))
}

pub(crate) fn elim_evidence(
    eqs: &[Poly],
    obj: &Poly,
    lam_sq: &Rat,
    budget: &GroebnerBudget,
    report: &mut BudgetReport,
) -> Result<Option<Evidence>> {
    let t: Var = eqs
        .iter()
        .chain(std::iter::once(obj))
        .flat_map(|p| p.vars())
        .max()
        .map_or(0, |v| v + 1);
    let mut gens = eqs.to_vec();
    gens.push(&Poly::var(t) - obj);
    let keep: BTreeSet<Var> = [t].into();
    let gb = elimination_basis(&gens, &keep, budget)?;
    report.groebner_steps += gb.steps;
    let Some(g) = gb.restricted_to(&keep).into_iter().next() else {
        return Ok(None);
    };
    let u = UniPoly::from_poly(&g, t).expect("eliminant is univariate");
    Ok(max_real_root_leq(&u, lam_sq)?.then_some(Evidence::Elim { poly: u }))
}

pub(crate) fn bb_evidence(
    eqs: &[Poly],
    obj: &Poly,
    lam_sq: &Rat,
    budget: &BbBudget,
    report: &mut BudgetReport,
) -> Result<Option<Evidence>> {
    let vars: BTreeSet<Var> = eqs
        .iter()
        .chain(std::iter::once(obj))
        .flat_map(|p| p.vars())
        .collect();
    let budget = BbBudget {
        target: Some(lam_sq.clone()),
        ..budget.clone()
    };
    let r = bb_sup_bound(obj, eqs, &IntBox::unit_cube(vars), &budget)?;
    report.bb_nodes += r.nodes;
    if r.status == BbStatus::TargetExceeded {
        return Ok(None);
    }
    Ok(match r.bound {
        None => Some(Evidence::Bb { bound: None }),
        Some(b) if b <= *lam_sq => Some(Evidence::Bb { bound: Some(b) }),
        Some(_) => None,
    })
}

pub fn run_checker(
    checker: Checker,
    eqs: &[Poly],
    obj: &Poly,
    lam_sq: &Rat,
    cfg: &DecideConfig,
    report: &mut BudgetReport,
) -> Result<Option<Evidence>> {
    match checker {
        Checker::Ideal => ideal_evidence(eqs, obj, lam_sq, &cfg.groebner, report),
        Checker::Elim => elim_evidence(eqs, obj, lam_sq, &cfg.groebner, report),
        Checker::Bb => bb_evidence(eqs, obj, lam_sq, &cfg.bb, report),
    }
}

/// Ideal-reduction check on the full system.
pub fn check_ideal(
    sys: &ConstraintSystem,
    q_obj: &Poly,
    lam_sq: &Rat,
    budget: &GroebnerBudget,
) -> Result<Option<Evidence>> {
    ideal_evidence(&sys.equalities, q_obj, lam_sq, budget, &mut BudgetReport::default())
}

/// Candidate-value check: eliminate down to `t = q_obj` and bound the real roots.
pub fn check_elim(
    sys: &ConstraintSystem,
    q_obj: &Poly,
    lam_sq: &Rat,
    budget: &GroebnerBudget,
) -> Result<Option<Evidence>> {
    elim_evidence(&sys.equalities, q_obj, lam_sq, budget, &mut BudgetReport::default())
}

/// Interval branch-and-bound over `[-1, 1]` for every variable.
pub fn check_bb(
    sys: &ConstraintSystem,
    q_obj: &Poly,
    lam_sq: &Rat,
    budget: &BbBudget,
) -> Result<Option<Evidence>> {
    bb_evidence(&sys.equalities, q_obj, lam_sq, budget, &mut BudgetReport::default())
}
