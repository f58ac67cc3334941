use std::path::PathBuf;
use std::process::Command;

use qfa_cli::{apply_budget_overrides, parse_instance, run};
use qfa_core::{DecideConfig, LanguageSpec, Verdict, VerdictKind};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qfa-intersect").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const MINIMAL: &str = r#"{
  "n": 2, "s": ["1", "0"], "letters": ["b"],
  "phi": {"b": [["3/5", "4/5"], ["-4/5", "3/5"]]},
  "P": [["1", "0"], ["0", "1"]], "lambda": "1",
  "language": {"type": "sigma-star"}
}"#;

#[test]
fn parses_minimal_instance() {
    let inst = parse_instance(MINIMAL).unwrap();
    assert_eq!(inst.automaton.dim(), 2);
    assert_eq!(inst.language, LanguageSpec::SigmaStar { alphabet: vec!['b'] });
    assert_eq!(inst.config, DecideConfig::default());
}

#[test]
fn rejects_bad_instances() {
    let e = parse_instance(&MINIMAL.replace(r#""s": ["1", "0"]"#, r#""s": ["1", "1"]"#)).unwrap_err();
    assert!(e.0.contains("s not unit norm"), "{e}");
    let e = parse_instance(&MINIMAL.replace(r#""lambda": "1""#, r#""lambda": "1/0""#)).unwrap_err();
    assert!(e.0.contains("lambda") && e.0.contains("1/0"), "{e}");
    let e = parse_instance(&MINIMAL.replace(r#""3/5", "4/5""#, r#""3/5", "x""#)).unwrap_err();
    assert!(e.0.contains("phi.b"), "{e}");
    let e = parse_instance(&MINIMAL.replace("sigma-star", "regular")).unwrap_err();
    assert!(e.0.contains("language"), "{e}");
    let e = parse_instance(&MINIMAL.replace(r#""type": "sigma-star""#, r#""type": "sigma-star", "alphabet": ["c"]"#))
        .unwrap_err();
    assert!(e.0.contains("letter c"), "{e}");
}

#[test]
fn budget_overrides() {
    let mut cfg = DecideConfig::default();
    apply_budget_overrides(&mut cfg, "max_words=7, bb_nodes=11,max_degree=2").unwrap();
    assert_eq!(cfg.max_words, 7);
    assert_eq!(cfg.bb.max_nodes, 11);
    assert_eq!(cfg.degrees, vec![1, 2]);
    assert!(apply_budget_overrides(&mut cfg, "speed=3").is_err());
    assert!(apply_budget_overrides(&mut cfg, "max_words").is_err());
}

#[test]
fn check_empty() {
    let (code, out, _) = invoke(&["check", &fixture("blondel.json"), "--certificate"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("EMPTY"));
    assert!(out.contains("certificate: degree 2"), "{out}");
    assert!(out.contains("ideal"), "{out}");
}

#[test]
fn check_nonempty_and_semilinear() {
    let (code, out, _) = invoke(&["check", &fixture("circle.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("NONEMPTY"));
    assert!(out.contains("witness: bbb"), "{out}");
    let (code, out, _) = invoke(&["check", &fixture("semilinear.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("EMPTY"));
}

#[test]
fn check_unknown_exits_two() {
    let (code, out, _) = invoke(&["check", &fixture("unknown.json")]);
    assert_eq!(code, 2);
    assert_eq!(out.lines().next(), Some("UNKNOWN"));
}

#[test]
fn json_verdict_reparses() {
    let (code, out, _) = invoke(&["check", &fixture("blondel.json"), "--json"]);
    assert_eq!(code, 0);
    let v: Verdict = serde_json::from_str(&out).unwrap();
    assert_eq!(v.kind, VerdictKind::Empty);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap().trim(), out.trim());
    let (_, again, _) = invoke(&["check", &fixture("blondel.json"), "--json"]);
    assert_eq!(again, out);
}

#[test]
fn enumerate_palindromes() {
    let (code, out, _) = invoke(&["enumerate", &fixture("palindromes.json"), "--max", "5"]);
    assert_eq!(code, 0);
    let words: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(words, vec!["ε", "aa", "bb", "aaaa", "abba"]);
    // cos² of twice the angle: (3/5)² − (4/5)² = −7/25
    assert_eq!(out.lines().nth(1), Some("aa\t49/625\treject"));
    assert_eq!(out.lines().nth(2), Some("bb\t1\treject"));
}

#[test]
fn closure_lists_invariants() {
    let (code, out, _) = invoke(&["closure", &fixture("blondel.json"), "--degree", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("GroupClosure dim=2"), "{out}");
    assert!(out.contains("group 0: dim 2, 1 generators"), "{out}");
}

#[test]
fn alpha_demo_lists_convergents() {
    let (code, out, _) = invoke(&["alpha-demo", "--nmax", "12"]);
    assert_eq!(code, 0);
    assert!(out.contains("convergents: 0/1 1/2 2/5 5/12"), "{out}");
    for n in ["1", "2", "5", "12"] {
        assert!(
            out.lines().any(|l| l.starts_with(&format!("{n}\t")) && l.ends_with("yes")),
            "n = {n}: {out}"
        );
    }
    assert!(!out.contains("FAIL"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(invoke(&[]).0, 1);
    assert_eq!(invoke(&["frobnicate"]).0, 1);
    let (code, _, err) = invoke(&["check", "/nonexistent.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));
    assert_eq!(invoke(&["--help"]).0, 0);
}

#[test]
fn binary_honours_budget_env() {
    let bin = env!("CARGO_BIN_EXE_qfa-intersect");
    let out = Command::new(bin)
        .args(["check", &fixture("circle.json")])
        .env("QFA_INTERSECT_BUDGET", "max_words=2,max_degree=1,bb_nodes=20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("UNKNOWN"));
    let out = Command::new(bin)
        .args(["check", &fixture("circle.json")])
        .env("QFA_INTERSECT_BUDGET", "bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
