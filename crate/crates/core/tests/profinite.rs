use std::collections::BTreeMap;
use std::sync::Arc;

use emalg::profinite::{
    eval_term, format_set, library, mod_filter, satisfies, satisfies_all, Assignment, Inequality, OmegaTerm, LIBRARY,
};
use emalg::{corpus, Alphabet, Dfa, FinAlgebra, MonadKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn finite_term() -> impl Strategy<Value = OmegaTerm> {
    let leaf = prop::sample::select(vec!["x", "y", "z"]).prop_map(OmegaTerm::var);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(OmegaTerm::Concat),
            inner.prop_map(|t| OmegaTerm::OmegaPow(Box::new(t))),
        ]
    })
}

fn term() -> impl Strategy<Value = OmegaTerm> {
    prop_oneof![
        3 => finite_term(),
        1 => finite_term().prop_map(|t| OmegaTerm::InfPow(Box::new(t))),
        1 => (finite_term(), finite_term())
            .prop_map(|(u, v)| OmegaTerm::Concat(vec![u, OmegaTerm::InfPow(Box::new(v))])),
    ]
}

fn algebras() -> Vec<Arc<FinAlgebra>> {
    let mut out: Vec<Arc<FinAlgebra>> = corpus::algebras()
        .into_iter()
        .map(|(_, a)| a)
        .filter(|a| !matches!(a.kind(), MonadKind::Tree { .. }))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = Alphabet::letters(["a", "b"]).unwrap();
    for states in 1..=3 {
        for _ in 0..4 {
            out.push(Dfa::random(sigma.clone(), states, &mut rng).unwrap().to_recognizer().unwrap().algebra);
        }
    }
    out
}

fn assignments(alg: &FinAlgebra, vars: &[&str]) -> Vec<Assignment> {
    let elems = alg.carrier().elements_of(emalg::Sort::FINITE).to_vec();
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|b| {
                elems.iter().map(move |&e| {
                    let mut b = b.clone();
                    b.insert(v.to_string(), e);
                    b
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn display_and_parse_round_trip(t in term()) {
        let text = t.to_string();
        let back = OmegaTerm::parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back.sort().unwrap(), t.sort().unwrap());
        let vars = t.variables();
        for alg in algebras() {
            if t.sort().unwrap() != emalg::Sort::FINITE && alg.kind() != MonadKind::OmegaUp {
                continue;
            }
            for beta in assignments(&alg, &vars) {
                prop_assert_eq!(eval_term(&alg, &beta, &t).unwrap(), eval_term(&alg, &beta, &back).unwrap());
            }
        }
    }

    #[test]
    fn satisfaction_ignores_variable_names(s in finite_term(), t in finite_term()) {
        let ineq = Inequality::new(s.clone(), t.clone()).unwrap();
        let renamed = Inequality::parse(
            &ineq.to_string().replace('x', "p").replace('y', "q").replace('z', "r"),
        ).unwrap().remove(0);
        for alg in algebras().iter().filter(|a| a.kind() == MonadKind::Word) {
            prop_assert_eq!(satisfies(alg, &ineq).unwrap().is_none(), satisfies(alg, &renamed).unwrap().is_none());
        }
    }
}

#[test]
fn library_sets_round_trip() {
    for (name, text) in LIBRARY {
        let set = library(name).unwrap();
        assert_eq!(format_set(&set), *text);
        assert_eq!(Inequality::parse_set(&format_set(&set)).unwrap(), set);
        assert_eq!(library(&name.to_uppercase()).unwrap(), set);
    }
}

#[test]
fn mod_filter_keeps_exactly_the_satisfying_algebras() {
    let algs = algebras();
    let refs: Vec<&FinAlgebra> = algs.iter().map(|a| a.as_ref()).collect();
    for (name, _) in LIBRARY {
        let phi = library(name).unwrap();
        let kept = mod_filter(&refs, &phi).unwrap();
        let expected: Vec<&FinAlgebra> =
            refs.iter().copied().filter(|a| satisfies_all(a, &phi).unwrap().is_none()).collect();
        assert_eq!(kept.len(), expected.len(), "{name}");
        assert!(kept.iter().zip(&expected).all(|(a, b)| std::ptr::eq(*a, *b)));
    }
}

#[test]
fn aperiodicity_separates_groups_from_threshold_algebras() {
    let ap = library("aperiodic").unwrap();
    for (name, expected) in [("trivial", true), ("semilattice", true), ("contains_aa", true), ("z2", false), ("z3", false)] {
        let alg = corpus::algebra(name).unwrap();
        assert_eq!(satisfies_all(&alg, &ap).unwrap().is_none(), expected, "{name}");
    }
}
