//! Command-line front end for the intersection decision procedure.

mod instance;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use qfa_core::alphademo::{self, CertifiedReal};
use qfa_core::closure::expr_for_language;
use qfa_core::decide::{Checker, Evidence};
use qfa_core::lang::Words;
use qfa_core::poly::invariant_space;
use qfa_core::qfa::PrefixEvaluator;
use qfa_core::ratmat::fmt_rat;
use qfa_core::{decide_intersection, ClosureExpr, Verdict, VerdictKind};

pub use instance::{apply_budget_overrides, parse_instance, InstanceError, ProblemInstance};

/// Environment variable holding `key=value,...` budget overrides.
pub const BUDGET_ENV: &str = "QFA_INTERSECT_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "qfa-intersect", version, about = "Decide L ∩ |Q>| = ∅ for rational quantum automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether some word of the language is strictly accepted.
    Check {
        file: PathBuf,
        /// Print the emptiness certificate.
        #[arg(long)]
        certificate: bool,
        /// Emit the verdict as JSON.
        #[arg(long)]
        json: bool,
        /// Try invariant degrees 1..=D.
        #[arg(long, value_name = "D")]
        max_degree: Option<u32>,
        #[arg(long, value_name = "W")]
        max_words: Option<usize>,
    },
    /// List words of the language with their acceptance values.
    Enumerate {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        max: usize,
    },
    /// Print the closure expression and the invariant bases of its groups.
    Closure {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Members of L(α) for a quadratic irrational α.
    AlphaDemo {
        #[arg(long, default_value_t = 100)]
        nmax: u64,
        #[arg(long, value_enum, default_value_t = Alpha::Sqrt2)]
        alpha: Alpha,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Alpha {
    /// √2 − 1
    Sqrt2,
    /// (√5 − 1)/2
    Golden,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs one invocation and returns the exit status: 0 for a verdict of
/// EMPTY or NONEMPTY and for the other commands, 2 for UNKNOWN, 1 on errors.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn load(file: &PathBuf) -> Result<ProblemInstance, Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure(format!("cannot read {}: {e}", file.display())))?;
    let mut inst = parse_instance(&text)?;
    if let Ok(spec) = std::env::var(BUDGET_ENV) {
        apply_budget_overrides(&mut inst.config, &spec)?;
    }
    Ok(inst)
}

fn show_word(w: &str) -> &str {
    if w.is_empty() {
        "ε"
    } else {
        w
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Check {
            file,
            certificate,
            json,
            max_degree,
            max_words,
        } => {
            let mut inst = load(&file)?;
            if let Some(d) = max_degree {
                inst.config.degrees = (1..=d).collect();
            }
            if let Some(w) = max_words {
                inst.config.max_words = w;
            }
            let v = decide_intersection(&inst.automaton, &inst.language, &inst.config)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                print_verdict(&v, certificate, out)?;
            }
            Ok(if v.kind == VerdictKind::Unknown { 2 } else { 0 })
        }
        Command::Enumerate { file, max } => {
            let inst = load(&file)?;
            let q = &inst.automaton;
            let mut eval = PrefixEvaluator::new(q);
            for w in Words::new(&inst.language).take(max) {
                let v = eval.acceptance_sq(&w)?;
                let mark = if q.exceeds_threshold(&v) { "accept" } else { "reject" };
                writeln!(out, "{}\t{}\t{mark}", show_word(&w), fmt_rat(&v))?;
            }
            Ok(0)
        }
        Command::Closure { file, degree } => {
            let inst = load(&file)?;
            let e = expr_for_language(&inst.language, &inst.automaton)?;
            write!(out, "{e}")?;
            let mut leaves = Vec::new();
            collect_groups(&e, &mut leaves);
            for (i, (dim, gens)) in leaves.iter().enumerate() {
                let basis = invariant_space(*dim, gens, degree)?;
                writeln!(
                    out,
                    "group {i}: dim {dim}, {} generators, {} invariants of degree <= {degree}",
                    gens.len(),
                    basis.len()
                )?;
                let d = *dim as qfa_core::poly::Var;
                let name = |v: qfa_core::poly::Var| format!("x{}_{}", v / d + 1, v % d + 1);
                for p in &basis.polys {
                    writeln!(out, "  {}", p.display_with(&name))?;
                }
            }
            Ok(0)
        }
        Command::AlphaDemo { nmax, alpha } => {
            let a = match alpha {
                Alpha::Sqrt2 => CertifiedReal::sqrt2_minus_1(),
                Alpha::Golden => CertifiedReal::golden_fraction(),
            };
            let conv = alphademo::hurwitz_candidates(&a, nmax.max(1))?;
            writeln!(out, "alpha = {}", a.description)?;
            let cs: Vec<String> = conv.iter().map(|(p, q)| format!("{p}/{q}")).collect();
            writeln!(out, "convergents: {}", cs.join(" "))?;
            writeln!(out, "n\tq\tgap\tn^2*gap\tcos_check\tconvergent")?;
            for row in alphademo::scan(&a, nmax)? {
                let m = &row.member;
                let scaled = &m.gap * qfa_core::Rat::from_integer((m.n * m.n).into());
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    m.n,
                    m.q,
                    fmt_rat(&m.gap),
                    fmt_rat(&scaled),
                    if row.cosine_ok { "ok" } else { "FAIL" },
                    if row.convergent { "yes" } else { "" }
                )?;
            }
            Ok(0)
        }
    }
}

fn collect_groups(e: &ClosureExpr, acc: &mut Vec<(usize, Vec<qfa_core::QMat>)>) {
    match e {
        ClosureExpr::GroupClosure { dim, gens } => acc.push((*dim, gens.clone())),
        ClosureExpr::Fixed(_) => {}
        ClosureExpr::Coset { of, .. }
        | ClosureExpr::BlockProduct { of, .. }
        | ClosureExpr::Permute { of, .. } => collect_groups(of, acc),
        ClosureExpr::Sandwich { pairs, middle } => {
            collect_groups(pairs, acc);
            collect_groups(middle, acc);
        }
        ClosureExpr::Product(xs) | ClosureExpr::BlockSum(xs) | ClosureExpr::Union(xs) => {
            xs.iter().for_each(|x| collect_groups(x, acc))
        }
    }
}

fn describe(e: &Evidence) -> String {
    match e {
        Evidence::Ideal { constant } => format!("objective reduces to {} modulo the ideal", fmt_rat(constant)),
        Evidence::Infeasible => "equalities generate the unit ideal".into(),
        Evidence::Elim { poly } => format!("objective values are roots of {poly}"),
        Evidence::Bb { bound: Some(b) } => format!("objective bounded by {}", fmt_rat(b)),
        Evidence::Bb { bound: None } => "no feasible box survives".into(),
    }
}

fn print_verdict(v: &Verdict, certificate: bool, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}", v.kind)?;
    if let (Some(w), Some(val)) = (&v.witness, &v.witness_value) {
        writeln!(out, "witness: {}  (value^2 = {})", show_word(w), fmt_rat(val))?;
    }
    let r = &v.report;
    writeln!(
        out,
        "words: {}  degrees: {:?}  systems: {}  groebner steps: {}  bb nodes: {}  budget hits: {}",
        r.words_enumerated, r.degrees_tried, r.systems_checked, r.groebner_steps, r.bb_nodes, r.budget_hits
    )?;
    if certificate {
        match &v.certificate {
            None => writeln!(out, "no certificate")?,
            Some(c) => {
                if let Some(n) = c.exhaustive_words {
                    writeln!(out, "certificate: finite language, all {n} words checked")?;
                } else {
                    writeln!(out, "certificate: degree {}, {} branches", c.degree, c.branches.len())?;
                    for b in &c.branches {
                        let name = match b.checker {
                            Checker::Ideal => "ideal",
                            Checker::Elim => "elim",
                            Checker::Bb => "bb",
                        };
                        let scope = if b.restricted { "restricted" } else { "full" };
                        writeln!(
                            out,
                            "  branch {:?}: {name} ({scope}): {}",
                            b.choices,
                            describe(&b.evidence)
                        )?;
                    }
                }
            }
        }
    }
    Ok(())
}
