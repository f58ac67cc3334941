//! Fixtures shared by the benchmarks.

use qfa_core::ratmat::{int, rat};
use qfa_core::{
    LanguageSpec, LinearComponent, LinearGrammar, QMat, QVec, QuantumAutomaton, Rat, Rule, SemilinearLanguage,
};

pub fn m_alpha() -> QMat {
    QMat::from_fracs(&[&[(3, 5), (4, 5)], &[(-4, 5), (3, 5)]])
}

pub fn rot90() -> QMat {
    QMat::from_ints(&[&[0, -1], &[1, 0]])
}

pub fn automaton(letters: Vec<(char, QMat)>, p: QMat, lambda: Rat) -> QuantumAutomaton {
    QuantumAutomaton::new(QVec::new(vec![int(1), int(0)]), letters, p, lambda).unwrap()
}

/// The circle-group instance with `P = I` and `λ = 1`.
pub fn blondel() -> (QuantumAutomaton, LanguageSpec) {
    (
        automaton(vec![('b', m_alpha())], QMat::identity(2), int(1)),
        LanguageSpec::SigmaStar { alphabet: vec!['b'] },
    )
}

pub fn semilinear() -> (QuantumAutomaton, LanguageSpec) {
    let l = SemilinearLanguage::new(
        vec!['b'],
        vec![LinearComponent::new(vec!["b".into()], vec![1], vec![vec![4]]).unwrap()],
    )
    .unwrap();
    (
        automaton(vec![('b', rot90())], QMat::diag(&[int(1), int(0)]), rat(1, 2)),
        LanguageSpec::Semilinear(l),
    )
}

pub fn palindromes() -> LanguageSpec {
    LanguageSpec::LinearCfg(
        LinearGrammar::from_rules(
            &['a', 'b'],
            "S",
            vec![
                Rule::linear("S", "a", "S", "a"),
                Rule::linear("S", "b", "S", "b"),
                Rule::terminal("S", ""),
            ],
        )
        .unwrap(),
    )
}

pub fn two_letter(lambda: Rat) -> QuantumAutomaton {
    automaton(
        vec![('a', m_alpha()), ('b', rot90())],
        QMat::diag(&[int(1), int(0)]),
        lambda,
    )
}
