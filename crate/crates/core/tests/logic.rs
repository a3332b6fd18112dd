use std::collections::HashMap;
use std::sync::Arc;

use emalg::algebra::semigroups;
use emalg::logic::{fo_definable, is_definable_algebra, theory_algebra, EfTyper};
use emalg::profinite::{library, satisfies_all};
use emalg::suite::words;
use emalg::{Alphabet, Dfa, FinAlgebra};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn types_compose_on_all_short_words() {
    let ws = words(2, 5);
    let mut typer = EfTyper::new();
    for m in 0..=2 {
        let mut table: HashMap<(u32, u32), u32> = HashMap::new();
        for u in &ws {
            for v in &ws {
                let uv: Vec<usize> = u.iter().chain(v).copied().collect();
                let (tu, tv, tuv) = (typer.word_type(u, m), typer.word_type(v, m), typer.word_type(&uv, m));
                let seen = *table.entry((tu, tv)).or_insert(tuv);
                assert_eq!(seen, tuv, "rank {m}: type of {u:?}{v:?} is not determined by its factors");
            }
        }
    }
}

#[test]
fn theory_morphism_is_the_type_map() {
    let sigma = Alphabet::letters(["a", "b"]).unwrap();
    let mut typer = EfTyper::new();
    for m in 0..=1 {
        let th = theory_algebra(&sigma, m).unwrap();
        let mut class_of_type = HashMap::new();
        for w in words(2, 6) {
            let c = th.theta(&w).unwrap();
            assert_eq!(c, th.class_of(&w).unwrap());
            let t = typer.word_type(&w, m);
            assert_eq!(*class_of_type.entry(t).or_insert(c), c);
        }
        // distinct classes have distinct types
        let mut classes: Vec<_> = class_of_type.values().copied().collect();
        classes.sort();
        classes.dedup();
        assert_eq!(classes.len(), class_of_type.len());
    }
}

/// Semigroups of order up to 4 and transition semigroups of random automata.
fn word_algebras(rng: &mut ChaCha8Rng) -> Vec<Arc<FinAlgebra>> {
    let mut out: Vec<Arc<FinAlgebra>> = (1..=4).flat_map(|n| semigroups(n).unwrap()).map(Arc::new).collect();
    let sigma = Alphabet::letters(["a", "b"]).unwrap();
    for _ in 0..40 {
        let dfa = Dfa::random(sigma.clone(), rng.gen_range(2..=3), rng).unwrap();
        out.push(dfa.to_recognizer().unwrap().algebra);
    }
    out
}

#[test]
fn definable_algebras_are_the_aperiodic_ones() {
    let ap = library("aperiodic").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut yes, mut no) = (0, 0);
    for alg in word_algebras(&mut rng) {
        let aperiodic = satisfies_all(&alg, &ap).unwrap().is_none();
        assert_eq!(is_definable_algebra(&alg).unwrap(), aperiodic, "{}", emalg::algebra::format_algebra(&alg));
        if aperiodic {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 0 && no > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Unary languages are decided at low rank, so both deciders always
    /// commit.
    #[test]
    fn deciders_agree_on_unary_languages(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = Alphabet::letters(["a"]).unwrap();
        let dfa = Dfa::random(sigma, rng.gen_range(1..=4), &mut rng).unwrap();
        let v = fo_definable(&dfa).unwrap();
        prop_assert!(!v.inconclusive_rank);
        prop_assert_eq!(v.definable, v.rank.is_some());
    }
}
