use std::fmt::Debug;

use rand::Rng;

use super::{flat, normalize, random_element, random_nested, sing, FreeElement, MonadKind};
use crate::error::Result;
use crate::order::Sort;

/// Outcome of [`check_monad_laws`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonadLawReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl MonadLawReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

type Label = (Sort, u8);

fn same<L: Clone + PartialEq>(a: &FreeElement<L>, b: &FreeElement<L>) -> bool {
    match (a, b) {
        (FreeElement::Up(u), FreeElement::Up(v)) => normalize(u) == normalize(v),
        _ => a == b,
    }
}

fn record<L: Debug>(report: &mut MonadLawReport, law: &str, input: &L, outcome: Result<bool>) {
    report.checked += 1;
    match outcome {
        Ok(true) => {}
        Ok(false) => report.violations.push(format!("{law} fails on {input:?}")),
        Err(e) => report.violations.push(format!("{law} errors on {input:?}: {e}")),
    }
}

/// Checks `flat ∘ sing = id`, `flat ∘ M sing = id` and
/// `flat ∘ flat = flat ∘ M flat` on `samples` random inputs each.
pub fn check_monad_laws<R: Rng>(kind: MonadKind, samples: usize, size: usize, rng: &mut R) -> MonadLawReport {
    let sorts = kind.sorts();
    let mut label = |rng: &mut R, s: Sort| -> Label { (s, rng.gen_range(0..3)) };
    let mut report = MonadLawReport::default();
    for _ in 0..samples {
        let sort = sorts[rng.gen_range(0..sorts.len())];
        let t = random_element(kind, sort, size, rng, &mut label);
        let outer = sing(kind, t.clone(), sort).and_then(|s| flat(&s)).map(|f| same(&f, &t));
        record(&mut report, "flat ∘ sing = id", &t, outer);
        let inner = t.try_map(|&(s, l)| sing(kind, (s, l), s)).and_then(|m| flat(&m)).map(|f| same(&f, &t));
        record(&mut report, "flat ∘ M sing = id", &t, inner);

        let sort = sorts[rng.gen_range(0..sorts.len())];
        let triple = random_element(kind, sort, size, rng, &mut |rng: &mut R, s| {
            random_nested(kind, s, size, rng, &mut label)
        });
        let assoc = (|| {
            let left = flat(&flat(&triple)?)?;
            let right = flat(&triple.try_map(flat)?)?;
            Ok(same(&left, &right))
        })();
        record(&mut report, "flat ∘ flat = flat ∘ M flat", &triple, assoc);
    }
    report
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn laws_hold_for_every_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [MonadKind::Word, MonadKind::OmegaUp, MonadKind::Tree { max_arity: 3 }] {
            let r = check_monad_laws(kind, 500, 4, &mut rng);
            assert!(r.is_ok(), "{kind}: {:?}", &r.violations[..r.violations.len().min(3)]);
            assert_eq!(r.checked, 1500);
        }
    }
}
