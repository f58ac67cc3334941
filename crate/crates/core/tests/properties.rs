use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use qfa_core::alphademo::{binary_truncation, CertifiedReal};
use qfa_core::closure::{compile, expr_for_language, select_system, witness_check_system, witness_for_word};
use qfa_core::lang::{membership, word_key, Words};
use qfa_core::poly::{eval, invariant_space};
use qfa_core::qfa::{acceptance_sq, phi_word, PrefixEvaluator};
use qfa_core::ratmat::{int, is_orthogonal, permute_entries, rat, transpose_permutation};
use qfa_core::realalg::{
    buchberger, interval_eval, sturm_isolate, GroebnerBudget, IntBox, Interval, MonomialOrder, UniPoly,
};
use qfa_core::{
    LanguageSpec, LinearComponent, Poly, QMat, QVec, QuantumAutomaton, Rat, SemilinearLanguage,
};

fn rotation() -> impl Strategy<Value = QMat> {
    (2i64..7, 1i64..6, any::<bool>(), any::<bool>()).prop_filter_map("m > n", |(m, n, swap, reflect)| {
        if n >= m {
            return None;
        }
        let (a, b, c) = (m * m - n * n, 2 * m * n, m * m + n * n);
        let (a, b) = if swap { (b, a) } else { (a, b) };
        Some(if reflect {
            QMat::from_fracs(&[&[(a, c), (b, c)], &[(b, c), (-a, c)]])
        } else {
            QMat::from_fracs(&[&[(a, c), (b, c)], &[(-b, c), (a, c)]])
        })
    })
}

fn automaton(a: QMat, b: QMat) -> QuantumAutomaton {
    QuantumAutomaton::new(
        QVec::new(vec![rat(3, 5), rat(4, 5)]),
        vec![('a', a), ('b', b)],
        QMat::diag(&[int(1), int(0)]),
        rat(1, 2),
    )
    .unwrap()
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn small_poly(vars: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((small_rat(), prop::collection::vec(0u32..3, vars as usize)), 1..5).prop_map(
        move |terms| {
            terms.iter().fold(Poly::zero(), |acc, (c, exps)| {
                let mono = exps
                    .iter()
                    .enumerate()
                    .fold(Poly::constant(c.clone()), |m, (v, &e)| &m * &Poly::var(v as u32).pow(e));
                &acc + &mono
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn words_stay_orthogonal(a in rotation(), b in rotation(), w in "[ab]{0,12}") {
        let q = automaton(a, b);
        let m = phi_word(&q, &w).unwrap();
        prop_assert!(is_orthogonal(&m));
        prop_assert!(m.mul(&m.transpose()).unwrap().is_identity());
        // orthogonal matrices preserve the norm, so the value never exceeds 1
        prop_assert!(acceptance_sq(&q, &w).unwrap() <= int(1));
    }

    #[test]
    fn prefix_evaluation_matches_direct(a in rotation(), b in rotation(), ws in prop::collection::vec("[ab]{0,10}", 1..12)) {
        let q = automaton(a, b);
        let mut e = PrefixEvaluator::new(&q);
        for w in &ws {
            let direct = acceptance_sq(&q, w).unwrap();
            prop_assert_eq!(e.acceptance_sq(w).unwrap(), direct.clone());
            prop_assert_eq!(e.accepts(w).unwrap(), direct > rat(1, 4));
        }
    }

    #[test]
    fn transpose_is_an_entry_permutation(m in rotation()) {
        prop_assert_eq!(permute_entries(&transpose_permutation(2), &m).unwrap(), m.transpose());
    }

    #[test]
    fn invariants_vanish_on_the_group(a in rotation(), w in "[ab]{0,8}") {
        let b = a.transpose();
        let q = automaton(a.clone(), b.clone());
        let basis = invariant_space(2, &[a, b], 2).unwrap();
        let m = phi_word(&q, &w).unwrap();
        for p in &basis.polys {
            prop_assert!(eval(p, &m).unwrap().is_zero());
        }
    }

    #[test]
    fn sturm_counts_distinct_roots(roots in prop::collection::vec(small_rat(), 1..5)) {
        let mut p = UniPoly::new(vec![int(1)]);
        for r in &roots {
            p = UniPoly::new(mul(p.coeffs(), &[-r.clone(), int(1)]));
        }
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        let ivs = sturm_isolate(&p).unwrap();
        prop_assert_eq!(ivs.len(), distinct.len());
        for r in &distinct {
            prop_assert_eq!(ivs.iter().filter(|iv| iv.contains(r)).count(), 1);
        }
    }

    #[test]
    fn interval_evaluation_encloses(p in small_poly(2), x in small_rat(), y in small_rat()) {
        let lo = |v: &Rat| v - rat(1, 3);
        let hi = |v: &Rat| v + rat(1, 3);
        let b = IntBox(BTreeMap::from([(0, Interval::new(lo(&x), hi(&x))), (1, Interval::new(lo(&y), hi(&y)))]));
        let enc = interval_eval(&p, &b).unwrap();
        for (px, py) in [(x.clone(), y.clone()), (lo(&x), hi(&y)), (hi(&x), lo(&y))] {
            prop_assert!(enc.contains(&p.eval_at(&[px, py]).unwrap()));
        }
    }

    #[test]
    fn generators_reduce_to_zero(gens in prop::collection::vec(small_poly(2), 1..3)) {
        let budget = GroebnerBudget::default();
        if let Ok(gb) = buchberger(&gens, MonomialOrder::GrevLex, &budget) {
            for g in gens.iter().chain(&gb.polys()) {
                prop_assert!(gb.normal_form(g, &budget).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn semilinear_words_round_trip(base in 0u64..3, period in 1u64..4, lam in 0u64..5, a in rotation()) {
        let l = SemilinearLanguage::new(
            vec!['a', 'b'],
            vec![LinearComponent::new(vec!["a".into(), "b".into()], vec![base, 0], vec![vec![period, 1]]).unwrap()],
        )
        .unwrap();
        let comp = &l.components[0];
        let w = comp.word(&[lam]);
        prop_assert!(l.member(&w));
        let spec = LanguageSpec::Semilinear(l.clone());
        let q = automaton(a.clone(), a.transpose());
        let wit = witness_for_word(&spec, &q, &w).unwrap().unwrap();
        let systems = compile(&expr_for_language(&spec, &q).unwrap(), 2).unwrap();
        let sys = select_system(&systems, &wit).unwrap();
        prop_assert!(witness_check_system(sys, &wit, &phi_word(&q, &w).unwrap()).unwrap());
    }

    #[test]
    fn enumeration_is_ordered_and_sound(k in 1usize..80) {
        let spec = LanguageSpec::SigmaStar { alphabet: vec!['b', 'a'] };
        let words: Vec<String> = Words::new(&spec).take(k).collect();
        for pair in words.windows(2) {
            prop_assert!(word_key(&['b', 'a'], &pair[0]) < word_key(&['b', 'a'], &pair[1]));
        }
        prop_assert!(words.iter().all(|w| membership(&spec, w)));
    }

    #[test]
    fn truncations_are_consistent(k in 1u32..200) {
        let g = CertifiedReal::golden_fraction();
        let t = binary_truncation(&g, k).unwrap();
        let next = binary_truncation(&g, k + 1).unwrap();
        let step = Rat::new(BigInt::from(1), BigInt::from(1) << (k + 1));
        prop_assert!(next == t || next == &t + &step);
        let iv = g.refine(k + 8);
        prop_assert!(t <= iv.lo && iv.hi - &t < step.clone() * int(2));
    }
}

fn mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
