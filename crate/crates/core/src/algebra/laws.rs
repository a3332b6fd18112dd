use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FinAlgebra;
use crate::monad::{flat, random_nested, sing, FreeElement, MonadKind, Tree};
use crate::order::{Elem, Sort};

/// Number of small trees checked exhaustively before switching to sampling.
pub(crate) const EXHAUSTIVE_BUDGET: usize = 200_000;
const DEFAULT_SAMPLES: usize = 2_000;
const DEFAULT_SEED: u64 = 0x5eed;

/// Outcome of [`check_algebra_laws`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub violations: Vec<String>,
    /// Number of law instances evaluated.
    pub checked: usize,
    /// Whether every small instance was covered before sampling started.
    pub exhaustive: bool,
}

impl LawReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, msg: String) {
        if self.violations.len() < 20 {
            self.violations.push(msg);
        }
    }
}

/// Checks the unit law, monotonicity of every product and the associative
/// law `π ∘ Mπ = π ∘ flat`: exhaustively on small instances, then on random
/// nested inputs.
pub fn check_algebra_laws(alg: &FinAlgebra) -> LawReport {
    check_algebra_laws_with(alg, DEFAULT_SAMPLES, &mut ChaCha8Rng::seed_from_u64(DEFAULT_SEED))
}

pub fn check_algebra_laws_with<R: Rng>(alg: &FinAlgebra, samples: usize, rng: &mut R) -> LawReport {
    let mut report = exhaustive(alg, EXHAUSTIVE_BUDGET);
    let full = alg.sorts() == alg.kind().sorts().as_slice() && alg.sorts().iter().all(|&s| !alg.elements_of(s).is_empty());
    if !full {
        return report;
    }
    let size = match alg.kind() {
        MonadKind::Word => 4,
        _ => 3,
    };
    let sorts = alg.kind().sorts();
    for _ in 0..samples {
        let sort = *sorts.choose(rng).expect("every kind has a sort");
        let t = random_nested(alg.kind(), sort, size, rng, &mut |rng: &mut R, s| {
            *alg.elements_of(s).choose(rng).expect("sorts are nonempty")
        });
        report.checked += 1;
        if let Some(msg) = nested_violation(alg, &t) {
            report.violation(msg);
        }
    }
    report
}

fn show(alg: &FinAlgebra, t: &FreeElement<FreeElement<Elem>>) -> String {
    t.map(|inner| inner.map(|&e| alg.name(e).to_owned())).to_string()
}

/// Compares `π(Mπ t)` with `π(flat t)`.
fn nested_violation(alg: &FinAlgebra, t: &FreeElement<FreeElement<Elem>>) -> Option<String> {
    let inner = t.try_map(|s| alg.eval_elements(s));
    let left = inner.and_then(|m| alg.eval_elements(&m));
    let right = flat(t).and_then(|f| alg.eval_elements(&f));
    match (left, right) {
        (Ok(l), Ok(r)) if l == r => None,
        (Ok(l), Ok(r)) => Some(format!(
            "evaluating {} in two steps gives `{}`, flattening first gives `{}`",
            show(alg, t),
            alg.name(l),
            alg.name(r)
        )),
        (Err(e), _) | (_, Err(e)) => Some(format!("cannot evaluate {}: {e}", show(alg, t))),
    }
}

pub(crate) fn exhaustive(alg: &FinAlgebra, budget: usize) -> LawReport {
    let mut report = LawReport {
        exhaustive: true,
        ..LawReport::default()
    };
    unit_law(alg, &mut report);
    monotonicity(alg, &mut report);
    match alg.kind() {
        MonadKind::Word => associativity(alg, &mut report),
        MonadKind::OmegaUp => wilke(alg, &mut report),
        MonadKind::Tree { max_arity } => tree_groupings(alg, max_arity as usize, budget, &mut report),
    }
    report
}

fn unit_law(alg: &FinAlgebra, report: &mut LawReport) {
    for e in alg.carrier().elements() {
        report.checked += 1;
        let ok = sing(alg.kind(), e, alg.sort_of(e))
            .and_then(|s| alg.eval_elements(&s))
            .is_ok_and(|v| v == e);
        if !ok {
            report.violation(format!("sing(`{}`) does not evaluate to itself", alg.name(e)));
        }
    }
}

fn monotonicity(alg: &FinAlgebra, report: &mut LawReport) {
    let carrier = alg.carrier();
    for (o, op) in alg.ops().iter().enumerate() {
        for cell in 0..op.cell_count() {
            let args = op.cell_args(carrier, cell);
            let r = op.table()[cell];
            for i in 0..args.len() {
                for &b in carrier.elements_of(op.args()[i]) {
                    if b == args[i] || !carrier.leq(args[i], b) {
                        continue;
                    }
                    let mut bigger = args.clone();
                    bigger[i] = b;
                    let s = alg.apply(o, &bigger);
                    report.checked += 1;
                    if !carrier.leq(r, s) {
                        report.violation(format!(
                            "{} is not monotone: `{}` <= `{}` in argument {} but `{}` is not below `{}`",
                            op.symbol(),
                            alg.name(args[i]),
                            alg.name(b),
                            i + 1,
                            alg.name(r),
                            alg.name(s)
                        ));
                    }
                }
            }
        }
    }
}

fn associativity(alg: &FinAlgebra, report: &mut LawReport) {
    let a1 = alg.elements_of(Sort::FINITE);
    for &x in a1 {
        for &y in a1 {
            let xy = alg.dot(x, y);
            for &z in a1 {
                report.checked += 1;
                let l = alg.dot(xy, z);
                let r = alg.dot(x, alg.dot(y, z));
                if l != r {
                    report.violation(format!(
                        "not associative at ({}, {}, {}): (xy)z = `{}` but x(yz) = `{}`",
                        alg.name(x),
                        alg.name(y),
                        alg.name(z),
                        alg.name(l),
                        alg.name(r)
                    ));
                }
            }
        }
    }
}

fn wilke(alg: &FinAlgebra, report: &mut LawReport) {
    if alg.op_index(&super::Symbol::Dot).is_none() {
        return;
    }
    associativity(alg, report);
    if alg.op_index(&super::Symbol::Omega).is_none() {
        return;
    }
    let a1 = alg.elements_of(Sort::FINITE);
    let ainf = alg.elements_of(Sort::INFINITE);
    let n = |e: Elem| alg.name(e);
    for &x in a1 {
        for &y in a1 {
            let xy = alg.dot(x, y);
            for &e in ainf {
                report.checked += 1;
                let l = alg.mix(xy, e);
                let r = alg.mix(x, alg.mix(y, e));
                if l != r {
                    report.violation(format!(
                        "mix is not associative at ({}, {}, {}): (xy)e = `{}` but x(ye) = `{}`",
                        n(x),
                        n(y),
                        n(e),
                        n(l),
                        n(r)
                    ));
                }
            }
            report.checked += 1;
            let l = alg.mix(x, alg.omega(alg.dot(y, x)));
            let r = alg.omega(xy);
            if l != r {
                report.violation(format!(
                    "x(yx)^w = `{}` but (xy)^w = `{}` at x = {}, y = {}",
                    n(l),
                    n(r),
                    n(x),
                    n(y)
                ));
            }
        }
        let base = alg.omega(x);
        let mut p = x;
        for k in 2..=a1.len() + 1 {
            p = alg.dot(p, x);
            report.checked += 1;
            if alg.omega(p) != base {
                report.violation(format!(
                    "(x^{k})^w = `{}` but x^w = `{}` at x = {}",
                    n(alg.omega(p)),
                    n(base),
                    n(x)
                ));
                break;
            }
        }
    }
}

/// Every tree with at most three nodes, and every root with all filled
/// children, is evaluated under each way of cutting it into a two-level
/// nested tree.
fn tree_groupings(alg: &FinAlgebra, max: usize, budget: usize, report: &mut LawReport) {
    let by_arity: Vec<Vec<Elem>> = (0..=max).map(|k| alg.elements_of(Sort(k as u8)).to_vec()).collect();
    let mut count = 0usize;
    let mut visit = |t: Tree<Elem>, report: &mut LawReport| -> bool {
        count += 1;
        if count > budget {
            report.exhaustive = false;
            return false;
        }
        check_groupings(alg, &t, max, report);
        true
    };
    let leaf_node = |b: Elem, k: usize, next: &mut usize| -> Tree<Elem> {
        let t = Tree::Node(b, (*next..*next + k).map(Tree::Var).collect());
        *next += k;
        t
    };
    for n in 1..=max {
        for &a in &by_arity[n] {
            // one filled child, possibly with one grandchild
            for i in 0..n {
                for m in 0..=max {
                    if n - 1 + m > max {
                        continue;
                    }
                    for &b in &by_arity[m] {
                        let mut next = 0;
                        let children = (0..n)
                            .map(|s| if s == i { leaf_node(b, m, &mut next) } else { next += 1; Tree::Var(next - 1) })
                            .collect();
                        if !visit(Tree::Node(a, children), report) {
                            return;
                        }
                        for j in 0..m {
                            for k in 0..=max {
                                if n - 1 + m - 1 + k > max {
                                    continue;
                                }
                                for &c in &by_arity[k] {
                                    let mut next = 0;
                                    let children = (0..n)
                                        .map(|s| {
                                            if s == i {
                                                let grand = (0..m)
                                                    .map(|r| {
                                                        if r == j {
                                                            leaf_node(c, k, &mut next)
                                                        } else {
                                                            next += 1;
                                                            Tree::Var(next - 1)
                                                        }
                                                    })
                                                    .collect();
                                                Tree::Node(b, grand)
                                            } else {
                                                next += 1;
                                                Tree::Var(next - 1)
                                            }
                                        })
                                        .collect();
                                    if !visit(Tree::Node(a, children), report) {
                                        return;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            // two or more filled children
            for mask in 1usize..(1 << n) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let filled: Vec<usize> = (0..n).filter(|s| mask >> s & 1 == 1).collect();
                let mut choice: Vec<Elem> = Vec::new();
                if !stars(alg, a, n, &filled, &by_arity, max, &mut choice, &mut visit, report) {
                    return;
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn stars(
    alg: &FinAlgebra,
    a: Elem,
    n: usize,
    filled: &[usize],
    by_arity: &[Vec<Elem>],
    max: usize,
    choice: &mut Vec<Elem>,
    visit: &mut impl FnMut(Tree<Elem>, &mut LawReport) -> bool,
    report: &mut LawReport,
) -> bool {
    let used: usize = choice.iter().map(|&b| alg.sort_of(b).arity()).sum();
    if used + (n - filled.len()) > max {
        return true;
    }
    if choice.len() == filled.len() {
        let mut next = 0;
        let mut it = choice.iter();
        let children = (0..n)
            .map(|s| {
                if filled.contains(&s) {
                    let b = *it.next().unwrap();
                    let k = alg.sort_of(b).arity();
                    let t = Tree::Node(b, (next..next + k).map(Tree::Var).collect());
                    next += k;
                    t
                } else {
                    next += 1;
                    Tree::Var(next - 1)
                }
            })
            .collect();
        return visit(Tree::Node(a, children), report);
    }
    for bs in by_arity {
        for &b in bs {
            choice.push(b);
            let go_on = stars(alg, a, n, filled, by_arity, max, choice, visit, report);
            choice.pop();
            if !go_on {
                return false;
            }
        }
    }
    true
}

fn check_groupings(alg: &FinAlgebra, t: &Tree<Elem>, max: usize, report: &mut LawReport) {
    let edges = internal_edges(t);
    for cuts in 1usize..(1 << edges) {
        let cut: Vec<bool> = (0..edges).map(|e| cuts >> e & 1 == 1).collect();
        let mut edge = 0;
        let mut outer = split(t, &cut, &mut edge);
        renumber(&mut outer, &mut 0);
        let outer = FreeElement::Tree(outer);
        // pieces with too many variables are not elements of the monad
        if outer.labels().iter().any(|piece| piece.sort().arity() > max) {
            continue;
        }
        report.checked += 1;
        if let Some(msg) = nested_violation(alg, &outer) {
            report.violation(msg);
        }
    }
}

fn internal_edges<L>(t: &Tree<L>) -> usize {
    match t {
        Tree::Var(_) => 0,
        Tree::Node(_, cs) => cs
            .iter()
            .map(|c| match c {
                Tree::Var(_) => 0,
                node => 1 + internal_edges(node),
            })
            .sum(),
    }
}

/// The nested tree whose inner trees are the pieces of `t` between cut edges.
fn split(t: &Tree<Elem>, cut: &[bool], edge: &mut usize) -> Tree<FreeElement<Elem>> {
    let mut outer_children = Vec::new();
    let mut inner = piece(t, cut, edge, &mut outer_children);
    let mut next = 0;
    renumber(&mut inner, &mut next);
    Tree::Node(FreeElement::Tree(inner), outer_children)
}

fn piece(
    t: &Tree<Elem>,
    cut: &[bool],
    edge: &mut usize,
    outer: &mut Vec<Tree<FreeElement<Elem>>>,
) -> Tree<Elem> {
    match t {
        Tree::Var(_) => {
            outer.push(Tree::Var(0));
            Tree::Var(0)
        }
        Tree::Node(l, cs) => {
            let children = cs
                .iter()
                .map(|c| match c {
                    Tree::Var(_) => {
                        outer.push(Tree::Var(0));
                        Tree::Var(0)
                    }
                    node => {
                        let e = *edge;
                        *edge += 1;
                        if cut[e] {
                            outer.push(split(node, cut, edge));
                            Tree::Var(0)
                        } else {
                            piece(node, cut, edge, outer)
                        }
                    }
                })
                .collect();
            Tree::Node(*l, children)
        }
    }
}

fn renumber<L>(t: &mut Tree<L>, next: &mut usize) {
    match t {
        Tree::Var(i) => {
            *i = *next;
            *next += 1;
        }
        Tree::Node(_, cs) => cs.iter_mut().for_each(|c| renumber(c, next)),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::tests::cyclic;
    use super::super::Symbol;
    use super::*;
    use crate::order::SortedOrderedSet;

    #[test]
    fn associative_tables_pass() {
        let report = check_algebra_laws(&cyclic(3));
        assert!(report.is_ok(), "{:?}", report.violations);
        assert!(report.exhaustive);
    }

    #[test]
    fn non_associative_magma_names_the_triple() {
        // x·y = y·x = y, y·y = x: not associative
        let carrier = Arc::new(SortedOrderedSet::discrete(Sort::FINITE, ["x", "y"]).unwrap());
        let table = [[0, 1], [1, 0]];
        let swapped = [[1, 1], [1, 0]];
        let alg = FinAlgebra::from_fn(MonadKind::Word, carrier.clone(), |_, a| table[a[0]][a[1]]).unwrap();
        assert!(check_algebra_laws(&alg).is_ok());
        let alg = FinAlgebra::from_fn(MonadKind::Word, carrier, |_, a| swapped[a[0]][a[1]]).unwrap();
        let report = check_algebra_laws(&alg);
        assert!(report.violations[0].contains("not associative at (x, x, y)"), "{:?}", report.violations);
    }

    #[test]
    fn omega_incoherence_is_flagged() {
        // one finite element s with s·s = s; omega(s) = p but mix(s, p) = q
        let mut b = SortedOrderedSet::builder([Sort::FINITE, Sort::INFINITE]);
        b.element("s", Sort::FINITE);
        b.element("p", Sort::INFINITE);
        b.element("q", Sort::INFINITE);
        let carrier = Arc::new(b.build().unwrap());
        let alg = FinAlgebra::from_fn(MonadKind::OmegaUp, carrier, |sym, _| match sym {
            Symbol::Dot => 0,
            Symbol::Omega => 1,
            _ => 2,
        })
        .unwrap();
        let report = check_algebra_laws(&alg);
        assert!(!report.is_ok());
        let t = FreeElement::Up(crate::monad::UpWord::Capped {
            prefix: vec![FreeElement::Up(crate::monad::UpWord::Finite(vec![0]))],
            last: FreeElement::Up(crate::monad::lasso(vec![], vec![0])),
        });
        assert!(nested_violation(&alg, &t).is_some());
        assert!(FinAlgebra::new(alg.kind(), alg.carrier().clone(), |sym, _| match sym {
            Symbol::Dot => 0,
            Symbol::Omega => 1,
            _ => 2,
        })
        .is_err());
    }

    #[test]
    fn groupings_cover_every_cut() {
        let t = Tree::Node(0, vec![Tree::Node(1, vec![]), Tree::Node(2, vec![Tree::Node(3, vec![])])]);
        assert_eq!(internal_edges(&t), 3);
        let mut edge = 0;
        let outer = split(&t, &[true, false, true], &mut edge);
        let shown = FreeElement::Tree(outer).map(|i| i.to_string()).to_string();
        assert_eq!(shown, "0(x0,2(x1))(1,3)");
    }
}
