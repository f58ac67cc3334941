//! The decision driver: word enumeration interleaved with degree-increasing
//! emptiness certification over compiled constraint systems.

mod checkers;

use serde::{Deserialize, Serialize};

pub use checkers::{check_bb, check_elim, check_ideal, objective, run_checker, Checker, Evidence};

use crate::closure::{compile, expr_for_language, ClosureExpr, ConstraintSystem};
use crate::error::{Error, Result};
use crate::lang::{LanguageSpec, Words};
use crate::qfa::{validate, PrefixEvaluator, QuantumAutomaton};
use crate::ratmat::Rat;
use crate::realalg::{BbBudget, GroebnerBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    Empty,
    Nonempty,
    Unknown,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::Empty => "EMPTY",
            VerdictKind::Nonempty => "NONEMPTY",
            VerdictKind::Unknown => "UNKNOWN",
        })
    }
}

/// How one compiled branch was shown to stay at or below the threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCertificate {
    pub choices: Vec<usize>,
    pub checker: Checker,
    /// Only the equalities whose variables all occur in the objective were used.
    pub restricted: bool,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub degree: u32,
    pub branches: Vec<BranchCertificate>,
    /// Set when the language is finite and every word was checked directly;
    /// holds the number of words.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive_words: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub words_enumerated: usize,
    pub degrees_tried: Vec<u32>,
    pub systems_checked: usize,
    pub groebner_steps: usize,
    pub bb_nodes: usize,
    /// Checker runs that stopped on a resource cap.
    pub budget_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Squared acceptance value of the witness.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_rat"
    )]
    pub witness_value: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub report: BudgetReport,
}

pub(crate) mod opt_rat {
    use crate::ratmat::{fmt_rat, parse_rat, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fmt_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(None),
            Some(s) => parse_rat(&s)
                .map(Some)
                .ok_or_else(|| D::Error::custom(format!("invalid rational '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideConfig {
    /// Degree levels tried in order, one per round.
    pub degrees: Vec<u32>,
    /// Words enumerated per round.
    pub batch: usize,
    pub max_words: usize,
    pub max_word_len: Option<usize>,
    /// Shorter words are enumerated but never reported as witnesses.
    pub min_word_len: usize,
    /// Further words checked after an EMPTY certificate is found.
    pub cross_check_words: usize,
    pub groebner: GroebnerBudget,
    pub bb: BbBudget,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig {
            degrees: vec![1, 2, 3, 4],
            batch: 64,
            max_words: 10_000,
            max_word_len: None,
            min_word_len: 0,
            cross_check_words: 256,
            groebner: GroebnerBudget::default(),
            bb: BbBudget {
                max_nodes: 2_000,
                ..BbBudget::default()
            },
        }
    }
}

/// Runs the checker ladder on one system, cheapest first.
pub fn certify_system(
    q: &QuantumAutomaton,
    sys: &ConstraintSystem,
    lam_sq: &Rat,
    cfg: &DecideConfig,
    report: &mut BudgetReport,
) -> Result<Option<BranchCertificate>> {
    let obj = objective(q, sys)?;
    report.systems_checked += 1;
    for checker in [Checker::Ideal, Checker::Elim, Checker::Bb] {
        for restricted in [true, false] {
            let eqs = checkers::equalities_for(sys, &obj, restricted);
            if restricted && eqs.len() == sys.equalities.len() && eqs.len() > 0 {
                // identical to the full run that follows
                continue;
            }
            match run_checker(checker, &eqs, &obj, lam_sq, cfg, report) {
                Ok(Some(evidence)) => {
                    return Ok(Some(BranchCertificate {
                        choices: sys.choices.clone(),
                        checker,
                        restricted,
                        evidence,
                    }))
                }
                Ok(None) => {}
                Err(Error::Budget(_)) => report.budget_hits += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// Certificate covering every branch at degree `d`, if the ladder succeeds
/// on all of them.
pub fn certify_level(
    q: &QuantumAutomaton,
    expr: &ClosureExpr,
    d: u32,
    cfg: &DecideConfig,
    report: &mut BudgetReport,
) -> Result<Option<Certificate>> {
    let Some(lam_sq) = q.lambda_sq() else {
        return Ok(None);
    };
    let systems = match compile(expr, d) {
        Ok(s) => s,
        Err(Error::Budget(_)) => {
            report.budget_hits += 1;
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let mut branches = Vec::with_capacity(systems.len());
    for sys in &systems {
        match certify_system(q, sys, &lam_sq, cfg, report)? {
            Some(b) => branches.push(b),
            None => return Ok(None),
        }
    }
    Ok(Some(Certificate {
        degree: d,
        branches,
        exhaustive_words: None,
    }))
}

/// Re-runs every recorded checker and compares the evidence.
pub fn replay_certificate(
    q: &QuantumAutomaton,
    spec: &LanguageSpec,
    cert: &Certificate,
    cfg: &DecideConfig,
) -> Result<bool> {
    let Some(lam_sq) = q.lambda_sq() else {
        return Ok(cert.exhaustive_words.is_some() && Words::new(spec).next().is_none());
    };
    if let Some(n) = cert.exhaustive_words {
        let words: Vec<String> = Words::new(spec).collect();
        if words.len() != n {
            return Ok(false);
        }
        let mut eval = PrefixEvaluator::new(q);
        for w in &words {
            if eval.accepts(w)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let systems = compile(&expr_for_language(spec, q)?, cert.degree)?;
    if systems.len() != cert.branches.len() {
        return Ok(false);
    }
    let mut report = BudgetReport::default();
    for (sys, b) in systems.iter().zip(&cert.branches) {
        if sys.choices != b.choices {
            return Ok(false);
        }
        let obj = objective(q, sys)?;
        let eqs = checkers::equalities_for(sys, &obj, b.restricted);
        let again = run_checker(b.checker, &eqs, &obj, &lam_sq, cfg, &mut report)?;
        if again.as_ref() != Some(&b.evidence) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn nonempty(w: String, value: Rat, report: BudgetReport) -> Verdict {
    Verdict {
        kind: VerdictKind::Nonempty,
        witness: Some(w),
        witness_value: Some(value),
        certificate: None,
        report,
    }
}

/// Decides whether some word of `spec` is strictly accepted by `q`.
///
/// Rounds alternate one enumeration batch with one degree level. A strictly
/// accepted word ends the run with NONEMPTY; a certificate covering all
/// branches at some level ends it with EMPTY, after which further words are
/// checked and any acceptor aborts with [`Error::Soundness`].
pub fn decide_intersection(
    q: &QuantumAutomaton,
    spec: &LanguageSpec,
    cfg: &DecideConfig,
) -> Result<Verdict> {
    let violations = validate(q);
    if !violations.is_empty() {
        return Err(Error::InvalidAutomaton(violations));
    }
    if let Some(c) = spec.alphabet().iter().find(|c| !q.letters.contains(c)) {
        return Err(Error::UnknownLetter(*c));
    }
    let mut report = BudgetReport::default();
    let mut eval = PrefixEvaluator::new(q);
    let mut words = Words::new(spec);
    if let Some(l) = cfg.max_word_len {
        words = words.with_max_len(l);
    }
    let lam_sq = q.lambda_sq();
    let expr = match lam_sq {
        Some(_) => Some(expr_for_language(spec, q)?),
        None => None,
    };
    let mut levels = cfg.degrees.iter().copied();
    let mut words_done = false;
    let mut levels_done = false;
    loop {
        if !words_done {
            for _ in 0..cfg.batch {
                if report.words_enumerated >= cfg.max_words {
                    words_done = true;
                    break;
                }
                let Some(w) = words.next() else {
                    words_done = true;
                    // every word of a finite language has been checked
                    if cfg.min_word_len == 0 && cfg.max_word_len.is_none() {
                        return Ok(Verdict {
                            kind: VerdictKind::Empty,
                            witness: None,
                            witness_value: None,
                            certificate: Some(Certificate {
                                degree: 0,
                                branches: Vec::new(),
                                exhaustive_words: Some(report.words_enumerated),
                            }),
                            report,
                        });
                    }
                    break;
                };
                report.words_enumerated += 1;
                if w.chars().count() < cfg.min_word_len {
                    continue;
                }
                if eval.accepts(&w)? {
                    let v = eval.acceptance_sq(&w)?;
                    return Ok(nonempty(w, v, report));
                }
            }
        }
        if !levels_done {
            match (levels.next(), &expr) {
                (Some(d), Some(e)) => {
                    report.degrees_tried.push(d);
                    if let Some(cert) = certify_level(q, e, d, cfg, &mut report)? {
                        for w in words.by_ref().take(cfg.cross_check_words) {
                            if eval.accepts(&w)? {
                                return Err(Error::Soundness(format!(
                                    "word {w:?} is accepted but degree {d} certified emptiness"
                                )));
                            }
                        }
                        return Ok(Verdict {
                            kind: VerdictKind::Empty,
                            witness: None,
                            witness_value: None,
                            certificate: Some(cert),
                            report,
                        });
                    }
                }
                _ => levels_done = true,
            }
        }
        if words_done && levels_done {
            return Ok(Verdict {
                kind: VerdictKind::Unknown,
                witness: None,
                witness_value: None,
                certificate: None,
                report,
            });
        }
    }
}
