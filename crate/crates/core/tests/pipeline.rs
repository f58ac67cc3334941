use qfa_core::decide::replay_certificate;
use qfa_core::lang::Words;
use qfa_core::qfa::accepts_strict;
use qfa_core::ratmat::{int, rat};
use qfa_core::{
    decide_intersection, DecideConfig, LanguageSpec, LinearGrammar, QMat, QVec, QuantumAutomaton, Rat,
    Rule, VerdictKind,
};

fn m_alpha() -> QMat {
    QMat::from_fracs(&[&[(3, 5), (4, 5)], &[(-4, 5), (3, 5)]])
}

/// `aⁿbⁿ` for `n ≥ 0`.
fn anbn() -> LanguageSpec {
    LanguageSpec::LinearCfg(
        LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![Rule::linear("S", "a", "S", "b"), Rule::terminal("S", "")],
        )
        .unwrap(),
    )
}

fn inverse_pair(p: QMat, lambda: Rat) -> QuantumAutomaton {
    QuantumAutomaton::new(
        QVec::new(vec![int(1), int(0)]),
        vec![('a', m_alpha()), ('b', m_alpha().transpose())],
        p,
        lambda,
    )
    .unwrap()
}

fn config() -> DecideConfig {
    DecideConfig {
        degrees: vec![1, 2],
        ..DecideConfig::default()
    }
}

#[test]
fn cancelling_letters_give_a_certified_empty_intersection() {
    // every aⁿbⁿ maps to the identity, so the value is always 0
    let q = inverse_pair(QMat::diag(&[int(0), int(1)]), int(0));
    let spec = anbn();
    let v = decide_intersection(&q, &spec, &config()).unwrap();
    assert_eq!(v.kind, VerdictKind::Empty);
    let cert = v.certificate.as_ref().unwrap();
    assert!(cert.exhaustive_words.is_none());
    assert!(replay_certificate(&q, &spec, cert, &config()).unwrap());
    for w in Words::new(&spec).take(30) {
        assert!(!accepts_strict(&q, &w).unwrap(), "{w}");
    }
}

#[test]
fn witness_is_the_first_accepted_word() {
    let q = QuantumAutomaton::new(
        QVec::new(vec![int(1), int(0)]),
        vec![('a', m_alpha()), ('b', QMat::from_ints(&[&[0, -1], &[1, 0]]))],
        QMat::diag(&[int(0), int(1)]),
        rat(1, 2),
    )
    .unwrap();
    let spec = anbn();
    let v = decide_intersection(&q, &spec, &config()).unwrap();
    assert_eq!(v.kind, VerdictKind::Nonempty);
    let first = Words::new(&spec).find(|w| accepts_strict(&q, w).unwrap()).unwrap();
    assert_eq!(v.witness.as_deref(), Some(first.as_str()));
    assert!(v.witness_value.unwrap() > rat(1, 4));
}

#[test]
fn finite_grammar_is_checked_exhaustively() {
    let spec = LanguageSpec::LinearCfg(
        LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![
                Rule::linear("S", "a", "T", "b"),
                Rule::terminal("T", "ab"),
                Rule::terminal("T", "ba"),
            ],
        )
        .unwrap(),
    );
    let q = inverse_pair(QMat::identity(2), int(1));
    let v = decide_intersection(&q, &spec, &config()).unwrap();
    assert_eq!(v.kind, VerdictKind::Empty);
    let cert = v.certificate.unwrap();
    assert_eq!(cert.exhaustive_words, Some(2));
    let json = serde_json::to_string(&cert).unwrap();
    assert_eq!(serde_json::from_str::<qfa_core::Certificate>(&json).unwrap(), cert);
}

#[test]
fn negative_threshold_accepts_the_empty_word() {
    let q = inverse_pair(QMat::diag(&[int(1), int(0)]), int(-1));
    let v = decide_intersection(&q, &anbn(), &config()).unwrap();
    assert_eq!(v.kind, VerdictKind::Nonempty);
    assert_eq!(v.witness.as_deref(), Some(""));
}
