use rand::Rng;

use super::{lasso, FreeElement, MonadKind, Tree, UpWord};
use crate::order::Sort;

/// Draws a random free element of the given sort. `size` bounds word lengths
/// and the number of tree nodes; `label` supplies a label of a requested sort.
pub fn random_element<L: PartialEq, R: Rng + ?Sized>(
    kind: MonadKind,
    sort: Sort,
    size: usize,
    rng: &mut R,
    label: &mut dyn FnMut(&mut R, Sort) -> L,
) -> FreeElement<L> {
    let size = size.max(1);
    fn word<L, R: Rng + ?Sized>(
        rng: &mut R,
        min: usize,
        size: usize,
        label: &mut dyn FnMut(&mut R, Sort) -> L,
    ) -> Vec<L> {
        let n = rng.gen_range(min..=size);
        (0..n).map(|_| label(rng, Sort::FINITE)).collect()
    }
    match kind {
        MonadKind::Word => FreeElement::Word(word(rng, 1, size, label)),
        MonadKind::OmegaUp if sort == Sort::FINITE => FreeElement::Up(UpWord::Finite(word(rng, 1, size, label))),
        MonadKind::OmegaUp => {
            let prefix = word(rng, 0, size, label);
            if rng.gen_bool(0.5) {
                let period = word(rng, 1, size, label);
                FreeElement::Up(lasso(prefix, period))
            } else {
                let last = label(rng, Sort::INFINITE);
                FreeElement::Up(UpWord::Capped { prefix, last })
            }
        }
        MonadKind::Tree { max_arity } => {
            let mut budget = size;
            let mut t = random_tree(sort.arity(), max_arity as usize, &mut budget, rng, label);
            t.renumber(&mut 0);
            FreeElement::Tree(t)
        }
    }
}

/// Draws an element of `MMΣ` whose inner elements are random as well.
pub fn random_nested<L: PartialEq, R: Rng + ?Sized>(
    kind: MonadKind,
    sort: Sort,
    size: usize,
    rng: &mut R,
    label: &mut dyn FnMut(&mut R, Sort) -> L,
) -> FreeElement<FreeElement<L>> {
    random_element(kind, sort, size, rng, &mut |rng: &mut R, s| {
        random_element(kind, s, size, rng, &mut *label)
    })
}

fn random_tree<L, R: Rng + ?Sized>(
    vars: usize,
    max_arity: usize,
    budget: &mut usize,
    rng: &mut R,
    label: &mut dyn FnMut(&mut R, Sort) -> L,
) -> Tree<L> {
    if *budget == 0 {
        let l = label(rng, Sort(vars as u8));
        return Tree::Node(l, (0..vars).map(Tree::Var).collect());
    }
    *budget -= 1;
    let arity = if vars == 0 {
        rng.gen_range(0..=max_arity)
    } else {
        rng.gen_range(1..=max_arity)
    };
    let mut counts = vec![0; arity];
    for _ in 0..vars {
        counts[rng.gen_range(0..arity)] += 1;
    }
    let l = label(rng, Sort(arity as u8));
    let children = counts
        .into_iter()
        .map(|c| {
            if c == 1 && rng.gen_bool(0.5) {
                Tree::Var(0)
            } else {
                random_tree(c, max_arity, budget, rng, label)
            }
        })
        .collect();
    Tree::Node(l, children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_elements_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let kinds = [MonadKind::Word, MonadKind::OmegaUp, MonadKind::Tree { max_arity: 3 }];
        for kind in kinds {
            for sort in kind.sorts() {
                for _ in 0..200 {
                    let e = random_element(kind, sort, 6, &mut rng, &mut |_, s| s);
                    assert_eq!(e.sort(), sort);
                    e.validate(kind, |s| *s).unwrap();
                }
            }
        }
    }
}
