use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::Deserialize;

use qfa_core::ratmat::parse_rat;
use qfa_core::realalg::{BbBudget, GroebnerBudget};
use qfa_core::{
    DecideConfig, LanguageSpec, LinearComponent, LinearGrammar, QMat, QVec, QuantumAutomaton, Rat, Rule,
    SemilinearLanguage,
};

/// A decision problem read from JSON.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub automaton: QuantumAutomaton,
    pub language: LanguageSpec,
    pub config: DecideConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceError(pub String);

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InstanceError {}

struct R(Rat);

impl<'de> Deserialize<'de> for R {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s)
            .map(R)
            .ok_or_else(|| de::Error::custom(format!("invalid rational '{s}'")))
    }
}

fn one_char<E: de::Error>(s: &str) -> Result<char, E> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(E::custom(format!("letter '{s}' is not a single character"))),
    }
}

struct Letter(char);

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        one_char(&s).map(Letter)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    s: Vec<R>,
    letters: Vec<Letter>,
    phi: BTreeMap<String, Vec<Vec<R>>>,
    #[serde(rename = "P")]
    p: Vec<Vec<R>>,
    lambda: R,
    language: RawLanguage,
    #[serde(default)]
    config: RawConfig,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum RawLanguage {
    SigmaStar {
        #[serde(default)]
        alphabet: Option<Vec<Letter>>,
    },
    Semilinear {
        alphabet: Vec<Letter>,
        components: Vec<RawComponent>,
    },
    LinearCfg {
        alphabet: Vec<Letter>,
        axiom: String,
        rules: Vec<RawRule>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    words: Vec<String>,
    base: Vec<u64>,
    #[serde(default)]
    periods: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRule {
    Linear {
        lhs: String,
        u: String,
        #[serde(rename = "B")]
        mid: String,
        v: String,
    },
    Terminal {
        lhs: String,
        w: String,
    },
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    degrees: Option<Vec<u32>>,
    batch: Option<usize>,
    max_words: Option<usize>,
    max_word_len: Option<usize>,
    min_word_len: Option<usize>,
    cross_check_words: Option<usize>,
    groebner_steps: Option<usize>,
    groebner_basis: Option<usize>,
    groebner_degree: Option<u32>,
    bb_nodes: Option<usize>,
}

fn matrix(rows: Vec<Vec<R>>, n: usize, what: &str) -> Result<QMat, InstanceError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(InstanceError(format!("{what} is not {n}x{n}")));
    }
    let rows = rows.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
    QMat::from_rows(rows).map_err(|e| InstanceError(format!("{what}: {e}")))
}

fn core(e: qfa_core::Error) -> InstanceError {
    InstanceError(e.to_string())
}

/// Parses and validates an instance; rationals are `"p/q"` strings.
pub fn parse_instance(text: &str) -> Result<ProblemInstance, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawInstance = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        InstanceError(format!("schema error at {path}: {}", e.into_inner()))
    })?;
    let n = raw.n;
    if raw.s.len() != n {
        return Err(InstanceError(format!("s has length {}, expected {n}", raw.s.len())));
    }
    let s = QVec::new(raw.s.into_iter().map(|x| x.0).collect());
    let letters: Vec<char> = raw.letters.iter().map(|l| l.0).collect();
    let mut phi_raw = raw.phi;
    let mut phi = Vec::new();
    for c in &letters {
        let rows = phi_raw
            .remove(&c.to_string())
            .ok_or_else(|| InstanceError(format!("phi({c}) missing")))?;
        phi.push((*c, matrix(rows, n, &format!("phi({c})"))?));
    }
    if let Some(extra) = phi_raw.keys().next() {
        return Err(InstanceError(format!("phi({extra}) given for an undeclared letter")));
    }
    let p = matrix(raw.p, n, "P")?;
    let automaton = QuantumAutomaton::new(s, phi, p, raw.lambda.0).map_err(core)?;

    let chars = |v: Vec<Letter>| v.into_iter().map(|l| l.0).collect::<Vec<char>>();
    let language = match raw.language {
        RawLanguage::SigmaStar { alphabet } => LanguageSpec::SigmaStar {
            alphabet: alphabet.map(chars).unwrap_or_else(|| letters.clone()),
        },
        RawLanguage::Semilinear { alphabet, components } => {
            let comps = components
                .into_iter()
                .map(|c| LinearComponent::new(c.words, c.base, c.periods))
                .collect::<qfa_core::Result<Vec<_>>>()
                .map_err(core)?;
            LanguageSpec::Semilinear(SemilinearLanguage::new(chars(alphabet), comps).map_err(core)?)
        }
        RawLanguage::LinearCfg { alphabet, axiom, rules } => {
            let rules = rules
                .into_iter()
                .map(|r| match r {
                    RawRule::Linear { lhs, u, mid, v } => Rule::linear(&lhs, &u, &mid, &v),
                    RawRule::Terminal { lhs, w } => Rule::terminal(&lhs, &w),
                })
                .collect();
            LanguageSpec::LinearCfg(LinearGrammar::from_rules(&chars(alphabet), &axiom, rules).map_err(core)?)
        }
    };
    if let Some(c) = language.alphabet().iter().find(|c| !letters.contains(c)) {
        return Err(InstanceError(format!("language letter {c} not in the automaton alphabet")));
    }

    let rc = raw.config;
    let mut config = DecideConfig::default();
    let defaults_g = GroebnerBudget::default();
    if let Some(d) = rc.degrees {
        config.degrees = d;
    }
    config.batch = rc.batch.unwrap_or(config.batch).max(1);
    config.max_words = rc.max_words.unwrap_or(config.max_words);
    config.max_word_len = rc.max_word_len.or(config.max_word_len);
    config.min_word_len = rc.min_word_len.unwrap_or(config.min_word_len);
    config.cross_check_words = rc.cross_check_words.unwrap_or(config.cross_check_words);
    config.groebner = GroebnerBudget {
        max_steps: rc.groebner_steps.unwrap_or(defaults_g.max_steps),
        max_basis: rc.groebner_basis.unwrap_or(defaults_g.max_basis),
        max_degree: rc.groebner_degree.unwrap_or(defaults_g.max_degree),
        ..defaults_g
    };
    if let Some(nodes) = rc.bb_nodes {
        config.bb = BbBudget {
            max_nodes: nodes,
            ..config.bb
        };
    }
    Ok(ProblemInstance {
        automaton,
        language,
        config,
    })
}

/// Applies `key=value,...` overrides from the budget environment variable.
pub fn apply_budget_overrides(cfg: &mut DecideConfig, spec: &str) -> Result<(), InstanceError> {
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| InstanceError(format!("budget entry '{part}' is not key=value")))?;
        let num: usize = value
            .trim()
            .parse()
            .map_err(|_| InstanceError(format!("budget value '{value}' is not a count")))?;
        match key.trim() {
            "max_words" => cfg.max_words = num,
            "batch" => cfg.batch = num.max(1),
            "groebner_steps" => cfg.groebner.max_steps = num,
            "groebner_basis" => cfg.groebner.max_basis = num,
            "groebner_degree" => cfg.groebner.max_degree = num as u32,
            "groebner_terms" => cfg.groebner.max_terms = num,
            "bb_nodes" => cfg.bb.max_nodes = num,
            "max_degree" => cfg.degrees = (1..=num as u32).collect(),
            other => return Err(InstanceError(format!("unknown budget key '{other}'"))),
        }
    }
    Ok(())
}
