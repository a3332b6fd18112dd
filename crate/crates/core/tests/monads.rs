use std::collections::HashSet;

use emalg::monad::{check_monad_laws, flat, lasso, leq_free, normalize, random_element, random_nested, UpWord};
use emalg::{FreeElement, MonadKind, Sort};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [MonadKind; 3] = [MonadKind::Word, MonadKind::OmegaUp, MonadKind::Tree { max_arity: 3 }];

type Label = (Sort, u8);

fn label(rng: &mut ChaCha8Rng, s: Sort) -> Label {
    (s, rng.gen_range(0..3))
}

/// The V-shaped poset `0 <= 1`, `0 <= 2`.
fn v_leq(a: &u8, b: &u8) -> bool {
    a == b || *a == 0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monad_laws_on_seeded_batches(seed in any::<u64>(), k in 0..3usize, size in 1..6usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = check_monad_laws(KINDS[k], 20, size, &mut rng);
        prop_assert!(r.is_ok(), "{:?}", r.violations.first());
    }

    #[test]
    fn monotone_maps_preserve_the_free_order(seed in any::<u64>(), k in 0..3usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = KINDS[k];
        let sorts = kind.sorts();
        let sort = sorts[rng.gen_range(0..sorts.len())];
        let s = random_element(kind, sort, 5, &mut rng, &mut |rng: &mut ChaCha8Rng, _| rng.gen_range(0..3u8));
        // raise some labels from the bottom
        let t = s.map(|&x| if x == 0 && rng.gen_bool(0.5) { rng.gen_range(1..3) } else { x });
        prop_assert!(leq_free(&s, &t, v_leq));
        // collapsing the V onto the chain 0 <= 1 is monotone
        let f = |x: &u8| (*x > 0) as u8;
        prop_assert!(leq_free(&s.map(f), &t.map(f), |a, b| a <= b));
    }

    #[test]
    fn lasso_normal_form_is_canonical(
        prefix in prop::collection::vec(0..2u8, 0..4),
        period in prop::collection::vec(0..2u8, 1..4),
        rot in 0..4usize,
        reps in 1..3usize,
    ) {
        let base = lasso(prefix.clone(), period.clone());
        prop_assert_eq!(normalize(&base), base.clone());
        let pumped: Vec<u8> = period.iter().cycle().take(period.len() * reps).copied().collect();
        prop_assert_eq!(lasso(prefix.clone(), pumped), base.clone());
        // moving `rot` letters of the period into the prefix names the same word
        let r = rot % period.len();
        let mut longer = prefix.clone();
        longer.extend(&period[..r]);
        let mut rotated = period.clone();
        rotated.rotate_left(r);
        prop_assert_eq!(lasso(longer, rotated), base);
    }

    #[test]
    fn flattened_trees_are_valid(seed in any::<u64>(), arity in 0..3u8, size in 1..5usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = MonadKind::Tree { max_arity: 3 };
        let t = random_nested(kind, Sort(arity), size, &mut rng, &mut label);
        let f = flat(&t).unwrap();
        prop_assert!(f.validate(kind, |l: &Label| l.0).is_ok());
        prop_assert_eq!(f.sort(), Sort(arity));
    }
}

/// `s ⊑^M t` computed from its definition: some lasso over ordered pairs
/// projects to `s` and `t`.
fn lifted_order(max_prefix: usize, max_period: usize) -> HashSet<(UpWord<u8>, UpWord<u8>)> {
    let pairs: Vec<(u8, u8)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).filter(|(a, b)| v_leq(a, b)).collect();
    let words = |max: usize, min: usize| -> Vec<Vec<(u8, u8)>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<(u8, u8)>| {
                    pairs.iter().map(move |&p| {
                        let mut w = w.clone();
                        w.push(p);
                        w
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out.retain(|w| w.len() >= min);
        out
    };
    let mut rel = HashSet::new();
    for u in words(max_prefix, 0) {
        for v in words(max_period, 1) {
            let left = lasso(u.iter().map(|p| p.0).collect(), v.iter().map(|p| p.0).collect());
            let right = lasso(u.iter().map(|p| p.1).collect(), v.iter().map(|p| p.1).collect());
            rel.insert((left, right));
        }
    }
    rel
}

#[test]
fn lifted_order_equals_free_order_on_lassos() {
    let rel = lifted_order(2, 2);
    let mut lassos = HashSet::new();
    for (s, t) in &rel {
        lassos.insert(s.clone());
        lassos.insert(t.clone());
    }
    // every pair of lassos with prefix <= 1 and period <= 2 has its joint
    // witness inside the enumerated range
    let small: Vec<UpWord<u8>> = lassos
        .into_iter()
        .filter(|u| matches!(u, UpWord::Lasso { prefix, period } if prefix.len() <= 1 && period.len() <= 2))
        .collect();
    assert!(small.len() > 20);
    for s in &small {
        for t in &small {
            let free = leq_free(&FreeElement::Up(s.clone()), &FreeElement::Up(t.clone()), v_leq);
            assert_eq!(free, rel.contains(&(s.clone(), t.clone())), "{s:?} vs {t:?}");
        }
    }
}
