use std::collections::HashSet;
use std::sync::Arc;

use super::FinAlgebra;
use crate::error::Result;
use crate::monad::MonadKind;
use crate::order::{Sort, SortedOrderedSet};

/// Multiplication tables of all semigroups on `{0, .., n-1}`, one per
/// isomorphism class, in lexicographic order of their least relabelling.
pub fn semigroup_tables(n: usize) -> Vec<Vec<usize>> {
    let mut found = HashSet::new();
    let mut table = vec![usize::MAX; n * n];
    fill(n, 0, &mut table, &mut |t| {
        found.insert(canonical(n, t));
    });
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort();
    out
}

/// The semigroups of [`semigroup_tables`] as discretely ordered algebras.
pub fn semigroups(n: usize) -> Result<Vec<FinAlgebra>> {
    semigroup_tables(n)
        .into_iter()
        .map(|t| {
            let carrier = Arc::new(SortedOrderedSet::discrete(Sort::FINITE, (0..n).map(|i| i.to_string()))?);
            FinAlgebra::from_fn(MonadKind::Word, carrier, |_, x| t[x[0] * n + x[1]])
        })
        .collect()
}

fn fill(n: usize, cell: usize, table: &mut Vec<usize>, found: &mut impl FnMut(&[usize])) {
    if cell == n * n {
        found(table);
        return;
    }
    for v in 0..n {
        table[cell] = v;
        if consistent(n, table) {
            fill(n, cell + 1, table, found);
        }
    }
    table[cell] = usize::MAX;
}

/// Associativity on every triple whose products are already known.
fn consistent(n: usize, t: &[usize]) -> bool {
    let get = |a: usize, b: usize| t[a * n + b];
    for a in 0..n {
        for b in 0..n {
            let ab = get(a, b);
            if ab == usize::MAX {
                continue;
            }
            for c in 0..n {
                let bc = get(b, c);
                if bc == usize::MAX {
                    continue;
                }
                let (l, r) = (get(ab, c), get(a, bc));
                if l != usize::MAX && r != usize::MAX && l != r {
                    return false;
                }
            }
        }
    }
    true
}

fn canonical(n: usize, t: &[usize]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<usize>> = None;
    loop {
        // perm maps old names to new names
        let mut u = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                u[perm[a] * n + perm[b]] = perm[t[a * n + b]];
            }
        }
        if best.as_ref().is_none_or(|b| u < *b) {
            best = Some(u);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.expect("at least the identity")
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_up_to_isomorphism() {
        // 1, 5, 24, 188 semigroups of orders 1 to 4 up to isomorphism
        let counts: Vec<usize> = (1..=4).map(|n| semigroup_tables(n).len()).collect();
        assert_eq!(counts, [1, 5, 24, 188]);
        for s in semigroups(3).unwrap() {
            s.validate().unwrap();
        }
    }
}
