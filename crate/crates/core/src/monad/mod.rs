//! The three concrete monads: nonempty finite words, ultimately periodic
//! omega-words (two sorts, `1` and `inf`) and finite ranked trees.
//!
//! Trees are planar: a tree of sort `n` carries exactly the variable leaves
//! `x0, ..., x(n-1)`, each once and in left-to-right order. Substituting planar
//! trees into planar trees stays planar, so this is a submonad of the linear
//! tree monad and flattening never has to duplicate or rename anything.
//!
//! The downward-closed-sets construction is not a monad instance here.

mod laws;
mod random;
mod syntax;

pub use laws::{check_monad_laws, MonadLawReport};

pub use random::{random_element, random_nested};
pub use syntax::{parse_element, parse_pattern, Slot};

use std::fmt;

use crate::error::{Error, Result};
use crate::order::Sort;

/// Default cap on the arity of tree labels.
pub const DEFAULT_MAX_ARITY: u8 = 3;
/// Maximal number of nodes in a tree.
pub const MAX_TREE_NODES: usize = 10_000;

/// Which monad an element or algebra belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonadKind {
    Word,
    OmegaUp,
    Tree { max_arity: u8 },
}

impl MonadKind {
    pub fn sorts(self) -> Vec<Sort> {
        match self {
            MonadKind::Word => vec![Sort::FINITE],
            MonadKind::OmegaUp => vec![Sort::FINITE, Sort::INFINITE],
            MonadKind::Tree { max_arity } => (0..=max_arity).map(Sort).collect(),
        }
    }

    pub fn has_sort(self, sort: Sort) -> bool {
        self.sorts().contains(&sort)
    }

    pub fn name(self) -> &'static str {
        match self {
            MonadKind::Word => "word",
            MonadKind::OmegaUp => "omega",
            MonadKind::Tree { .. } => "tree",
        }
    }
}

impl fmt::Display for MonadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonadKind::Tree { max_arity } => write!(f, "tree {max_arity}"),
            k => f.write_str(k.name()),
        }
    }
}

/// An ultimately periodic word of sort `1` or `inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UpWord<L> {
    /// A nonempty finite word of sort `1`.
    Finite(Vec<L>),
    /// `prefix · period^ω`, kept in normal form.
    Lasso { prefix: Vec<L>, period: Vec<L> },
    /// A finite word of sort-`1` labels followed by one sort-`inf` label.
    Capped { prefix: Vec<L>, last: L },
}

/// A planar ranked tree; the root of a free element is always a node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree<L> {
    Var(usize),
    Node(L, Vec<Tree<L>>),
}

/// An element of `MΣ` for one of the three monads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FreeElement<L> {
    Word(Vec<L>),
    Up(UpWord<L>),
    Tree(Tree<L>),
}

impl<L> Tree<L> {
    /// Number of variable leaves.
    pub fn variables(&self) -> usize {
        match self {
            Tree::Var(_) => 1,
            Tree::Node(_, children) => children.iter().map(Tree::variables).sum(),
        }
    }

    pub fn nodes(&self) -> usize {
        match self {
            Tree::Var(_) => 1,
            Tree::Node(_, children) => 1 + children.iter().map(Tree::nodes).sum::<usize>(),
        }
    }

    pub fn map<M>(&self, f: &mut impl FnMut(&L) -> M) -> Tree<M> {
        match self {
            Tree::Var(i) => Tree::Var(*i),
            Tree::Node(l, children) => {
                let label = f(l);
                Tree::Node(label, children.iter().map(|c| c.map(f)).collect())
            }
        }
    }

    fn try_map<M>(&self, f: &mut impl FnMut(&L) -> Result<M>) -> Result<Tree<M>> {
        Ok(match self {
            Tree::Var(i) => Tree::Var(*i),
            Tree::Node(l, children) => {
                let label = f(l)?;
                let children = children.iter().map(|c| c.try_map(f)).collect::<Result<_>>()?;
                Tree::Node(label, children)
            }
        })
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a L>) {
        if let Tree::Node(l, children) = self {
            out.push(l);
            for c in children {
                c.collect_labels(out);
            }
        }
    }

    /// Renumbers variables `0, 1, ...` from left to right.
    fn renumber(&mut self, next: &mut usize) {
        match self {
            Tree::Var(i) => {
                *i = *next;
                *next += 1;
            }
            Tree::Node(_, children) => {
                for c in children {
                    c.renumber(next);
                }
            }
        }
    }
}

impl<L: Clone> Tree<L> {
    /// Replaces the `i`-th variable leaf with `subs[i]`.
    fn substitute(&self, subs: &[Tree<L>]) -> Tree<L> {
        match self {
            Tree::Var(i) => subs[*i].clone(),
            Tree::Node(l, children) => {
                Tree::Node(l.clone(), children.iter().map(|c| c.substitute(subs)).collect())
            }
        }
    }
}

impl<L> FreeElement<L> {
    pub fn sort(&self) -> Sort {
        match self {
            FreeElement::Word(_) | FreeElement::Up(UpWord::Finite(_)) => Sort::FINITE,
            FreeElement::Up(_) => Sort::INFINITE,
            FreeElement::Tree(t) => Sort(t.variables() as u8),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FreeElement::Word(_) => "word",
            FreeElement::Up(_) => "omega",
            FreeElement::Tree(_) => "tree",
        }
    }

    /// Labels in reading order (prefix before period, trees in preorder).
    pub fn labels(&self) -> Vec<&L> {
        match self {
            FreeElement::Word(w) | FreeElement::Up(UpWord::Finite(w)) => w.iter().collect(),
            FreeElement::Up(UpWord::Lasso { prefix, period }) => prefix.iter().chain(period).collect(),
            FreeElement::Up(UpWord::Capped { prefix, last }) => {
                prefix.iter().chain(std::iter::once(last)).collect()
            }
            FreeElement::Tree(t) => {
                let mut out = Vec::new();
                t.collect_labels(&mut out);
                out
            }
        }
    }

    /// Relabels every position, keeping the shape.
    pub fn map<M>(&self, mut f: impl FnMut(&L) -> M) -> FreeElement<M> {
        match self {
            FreeElement::Word(w) => FreeElement::Word(w.iter().map(f).collect()),
            FreeElement::Up(UpWord::Finite(w)) => FreeElement::Up(UpWord::Finite(w.iter().map(f).collect())),
            FreeElement::Up(UpWord::Lasso { prefix, period }) => FreeElement::Up(UpWord::Lasso {
                prefix: prefix.iter().map(&mut f).collect(),
                period: period.iter().map(&mut f).collect(),
            }),
            FreeElement::Up(UpWord::Capped { prefix, last }) => FreeElement::Up(UpWord::Capped {
                prefix: prefix.iter().map(&mut f).collect(),
                last: f(last),
            }),
            FreeElement::Tree(t) => FreeElement::Tree(t.map(&mut f)),
        }
    }

    pub fn try_map<M>(&self, mut f: impl FnMut(&L) -> Result<M>) -> Result<FreeElement<M>> {
        Ok(match self {
            FreeElement::Word(w) => FreeElement::Word(w.iter().map(f).collect::<Result<_>>()?),
            FreeElement::Up(UpWord::Finite(w)) => {
                FreeElement::Up(UpWord::Finite(w.iter().map(f).collect::<Result<_>>()?))
            }
            FreeElement::Up(UpWord::Lasso { prefix, period }) => FreeElement::Up(UpWord::Lasso {
                prefix: prefix.iter().map(&mut f).collect::<Result<_>>()?,
                period: period.iter().map(&mut f).collect::<Result<_>>()?,
            }),
            FreeElement::Up(UpWord::Capped { prefix, last }) => FreeElement::Up(UpWord::Capped {
                prefix: prefix.iter().map(&mut f).collect::<Result<_>>()?,
                last: f(last)?,
            }),
            FreeElement::Tree(t) => FreeElement::Tree(t.try_map(&mut f)?),
        })
    }

    /// Checks shape invariants and label sorts against `kind`.
    pub fn validate(&self, kind: MonadKind, sort_of: impl Fn(&L) -> Sort) -> Result<()> {
        let bad = |msg: String| Err(Error::SortMismatch(msg));
        match (kind, self) {
            (MonadKind::Word, FreeElement::Word(w)) => {
                if w.is_empty() {
                    return bad("empty word".into());
                }
                if w.iter().any(|l| sort_of(l) != Sort::FINITE) {
                    return bad("word label of sort other than 1".into());
                }
            }
            (MonadKind::OmegaUp, FreeElement::Up(u)) => {
                let finite = |w: &[L]| w.iter().all(|l| sort_of(l) == Sort::FINITE);
                match u {
                    UpWord::Finite(w) if w.is_empty() => return bad("empty finite word".into()),
                    UpWord::Finite(w) if !finite(w) => return bad("finite word with sort-inf label".into()),
                    UpWord::Lasso { period, .. } if period.is_empty() => return bad("empty period".into()),
                    UpWord::Lasso { prefix, period } if !finite(prefix) || !finite(period) => {
                        return bad("omega-word with misplaced sort-inf label".into())
                    }
                    UpWord::Capped { prefix, last }
                        if (!finite(prefix) || sort_of(last) != Sort::INFINITE) => {
                            return bad("capped omega-word needs a final sort-inf label".into());
                        }
                    _ => {}
                }
            }
            (MonadKind::Tree { max_arity }, FreeElement::Tree(t)) => {
                if matches!(t, Tree::Var(_)) {
                    return bad("tree root is a variable".into());
                }
                if t.nodes() > MAX_TREE_NODES {
                    return Err(Error::BoundExceeded(format!("tree exceeds {MAX_TREE_NODES} nodes")));
                }
                let mut next = 0;
                validate_tree(t, &sort_of, &mut next)?;
                if next > max_arity as usize {
                    return bad(format!("tree of sort {next} exceeds max arity {max_arity}"));
                }
            }
            _ => return bad(format!("{} element in the {} monad", self.kind_name(), kind.name())),
        }
        Ok(())
    }
}

fn validate_tree<L>(t: &Tree<L>, sort_of: &impl Fn(&L) -> Sort, next: &mut usize) -> Result<()> {
    match t {
        Tree::Var(i) => {
            if *i != *next {
                return Err(Error::SortMismatch(format!(
                    "variable x{i} where x{next} was expected (trees are planar)"
                )));
            }
            *next += 1;
        }
        Tree::Node(l, children) => {
            if sort_of(l).arity() != children.len() {
                return Err(Error::SortMismatch(format!(
                    "label of arity {} has {} children",
                    sort_of(l),
                    children.len()
                )));
            }
            for c in children {
                validate_tree(c, sort_of, next)?;
            }
        }
    }
    Ok(())
}

/// `sing(a)`: the one-position element labelled `a`.
pub fn sing<L>(kind: MonadKind, label: L, sort: Sort) -> Result<FreeElement<L>> {
    match kind {
        MonadKind::Word if sort == Sort::FINITE => Ok(FreeElement::Word(vec![label])),
        MonadKind::OmegaUp if sort == Sort::FINITE => Ok(FreeElement::Up(UpWord::Finite(vec![label]))),
        MonadKind::OmegaUp if sort == Sort::INFINITE => Ok(FreeElement::Up(UpWord::Capped {
            prefix: Vec::new(),
            last: label,
        })),
        MonadKind::Tree { max_arity } if sort.0 <= max_arity => Ok(FreeElement::Tree(Tree::Node(
            label,
            (0..sort.arity()).map(Tree::Var).collect(),
        ))),
        _ => Err(Error::SortMismatch(format!("no sort {sort} in the {} monad", kind.name()))),
    }
}

/// Flattening `MMΣ → MΣ`: concatenation for words, concatenation with
/// absorption for omega-words, substitution at variable leaves for trees.
pub fn flat<L: Clone + PartialEq>(t: &FreeElement<FreeElement<L>>) -> Result<FreeElement<L>> {
    fn finite<L: Clone>(w: &[FreeElement<L>], out: &mut Vec<L>) -> Result<()> {
        for inner in w {
            match inner {
                FreeElement::Word(v) | FreeElement::Up(UpWord::Finite(v)) => out.extend(v.iter().cloned()),
                other => {
                    return Err(Error::SortMismatch(format!(
                        "sort-{} element at a sort-1 position",
                        other.sort()
                    )))
                }
            }
        }
        Ok(())
    }
    match t {
        FreeElement::Word(ws) => {
            let mut out = Vec::new();
            for inner in ws {
                match inner {
                    FreeElement::Word(v) => out.extend(v.iter().cloned()),
                    _ => return Err(Error::SortMismatch("non-word inside a word".into())),
                }
            }
            Ok(FreeElement::Word(out))
        }
        FreeElement::Up(UpWord::Finite(ws)) => {
            let mut out = Vec::new();
            finite(ws, &mut out)?;
            Ok(FreeElement::Up(UpWord::Finite(out)))
        }
        FreeElement::Up(UpWord::Lasso { prefix, period }) => {
            let (mut u, mut v) = (Vec::new(), Vec::new());
            finite(prefix, &mut u)?;
            finite(period, &mut v)?;
            Ok(FreeElement::Up(lasso(u, v)))
        }
        FreeElement::Up(UpWord::Capped { prefix, last }) => {
            let mut u = Vec::new();
            finite(prefix, &mut u)?;
            match last {
                FreeElement::Up(UpWord::Lasso { prefix, period }) => {
                    u.extend(prefix.iter().cloned());
                    Ok(FreeElement::Up(lasso(u, period.clone())))
                }
                FreeElement::Up(UpWord::Capped { prefix, last }) => {
                    u.extend(prefix.iter().cloned());
                    Ok(FreeElement::Up(UpWord::Capped {
                        prefix: u,
                        last: last.clone(),
                    }))
                }
                _ => Err(Error::SortMismatch("sort-1 element at a sort-inf position".into())),
            }
        }
        FreeElement::Tree(outer) => {
            let mut out = flat_tree(outer)?;
            out.renumber(&mut 0);
            Ok(FreeElement::Tree(out))
        }
    }
}

fn flat_tree<L: Clone>(t: &Tree<FreeElement<L>>) -> Result<Tree<L>> {
    match t {
        Tree::Var(i) => Ok(Tree::Var(*i)),
        Tree::Node(FreeElement::Tree(inner), children) => {
            if inner.variables() != children.len() {
                return Err(Error::SortMismatch(format!(
                    "tree of sort {} at a node with {} children",
                    inner.variables(),
                    children.len()
                )));
            }
            let subs = children.iter().map(flat_tree).collect::<Result<Vec<_>>>()?;
            Ok(inner.substitute(&subs))
        }
        Tree::Node(_, _) => Err(Error::SortMismatch("non-tree inside a tree".into())),
    }
}

/// Builds `u · v^ω` in normal form: primitive period, shortest prefix.
pub fn lasso<L: PartialEq>(mut prefix: Vec<L>, mut period: Vec<L>) -> UpWord<L> {
    let n = period.len();
    if let Some(p) = (1..n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| period[i] == period[i - p])) {
        period.truncate(p);
    }
    while let (Some(a), Some(b)) = (prefix.last(), period.last()) {
        if a != b {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    UpWord::Lasso { prefix, period }
}

/// Re-normalises an omega-word.
pub fn normalize<L: PartialEq + Clone>(u: &UpWord<L>) -> UpWord<L> {
    match u {
        UpWord::Lasso { prefix, period } => lasso(prefix.clone(), period.clone()),
        other => other.clone(),
    }
}

/// The standard ordering on `MA`: identical shape, labels pointwise ordered.
/// Ultimately periodic words are compared position by position.
pub fn leq_free<L>(s: &FreeElement<L>, t: &FreeElement<L>, leq: impl Fn(&L, &L) -> bool) -> bool {
    let pointwise = |a: &[L], b: &[L]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| leq(x, y));
    match (s, t) {
        (FreeElement::Word(a), FreeElement::Word(b)) => pointwise(a, b),
        (FreeElement::Up(UpWord::Finite(a)), FreeElement::Up(UpWord::Finite(b))) => pointwise(a, b),
        (
            FreeElement::Up(UpWord::Capped { prefix: p, last: l }),
            FreeElement::Up(UpWord::Capped { prefix: q, last: m }),
        ) => pointwise(p, q) && leq(l, m),
        (
            FreeElement::Up(UpWord::Lasso { prefix: u, period: v }),
            FreeElement::Up(UpWord::Lasso { prefix: x, period: y }),
        ) => {
            let span = u.len().max(x.len()) + lcm(v.len(), y.len());
            (0..span).all(|i| leq(lasso_at(u, v, i), lasso_at(x, y, i)))
        }
        (FreeElement::Tree(a), FreeElement::Tree(b)) => leq_tree(a, b, &leq),
        _ => false,
    }
}

fn leq_tree<L>(a: &Tree<L>, b: &Tree<L>, leq: &impl Fn(&L, &L) -> bool) -> bool {
    match (a, b) {
        (Tree::Var(i), Tree::Var(j)) => i == j,
        (Tree::Node(l, cs), Tree::Node(m, ds)) => {
            cs.len() == ds.len() && leq(l, m) && cs.iter().zip(ds).all(|(c, d)| leq_tree(c, d, leq))
        }
        _ => false,
    }
}

/// The `i`-th letter of `prefix · period^ω`.
pub fn lasso_at<'a, L>(prefix: &'a [L], period: &'a [L], i: usize) -> &'a L {
    if i < prefix.len() {
        &prefix[i]
    } else {
        &period[(i - prefix.len()) % period.len()]
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn word(s: &str) -> FreeElement<char> {
        FreeElement::Word(w(s))
    }

    #[test]
    fn sing_examples() {
        assert_eq!(sing(MonadKind::Word, 'a', Sort::FINITE).unwrap(), word("a"));
        let t = sing(MonadKind::Tree { max_arity: 3 }, 'b', Sort(2)).unwrap();
        assert_eq!(t, FreeElement::Tree(Tree::Node('b', vec![Tree::Var(0), Tree::Var(1)])));
        assert_eq!(
            sing(MonadKind::OmegaUp, 'a', Sort::FINITE).unwrap(),
            FreeElement::Up(UpWord::Finite(vec!['a']))
        );
        assert!(sing(MonadKind::Tree { max_arity: 1 }, 'b', Sort(2)).is_err());
    }

    #[test]
    fn map_examples() {
        let t = word("aa");
        assert_eq!(t.map(|&c| c), t);
        assert_eq!(t.map(|_| 'b'), word("bb"));
        let tree = FreeElement::Tree(Tree::Node('b', vec![Tree::Node('c', vec![]), Tree::Var(0)]));
        let moved = tree.map(|&c| if c == 'b' { 'd' } else { c });
        assert_eq!(
            moved,
            FreeElement::Tree(Tree::Node('d', vec![Tree::Node('c', vec![]), Tree::Var(0)]))
        );
        assert_eq!(moved.sort(), tree.sort());
    }

    #[test]
    fn flat_words_concatenates() {
        let t = FreeElement::Word(vec![word("ab"), word("c")]);
        assert_eq!(flat(&t).unwrap(), word("abc"));
    }

    #[test]
    fn flat_of_sing_is_identity() {
        for kind in [MonadKind::Word, MonadKind::OmegaUp] {
            let t = match kind {
                MonadKind::Word => word("abba"),
                _ => FreeElement::Up(lasso(w("ab"), w("ba"))),
            };
            let s = sing(kind, t.clone(), t.sort()).unwrap();
            assert_eq!(flat(&s).unwrap(), t);
        }
    }

    #[test]
    fn flat_tree_substitutes_children() {
        let b = FreeElement::Tree(Tree::Node('b', vec![Tree::Var(0), Tree::Var(1)]));
        let c = FreeElement::Tree(Tree::Node('c', vec![]));
        let d = FreeElement::Tree(Tree::Node('d', vec![]));
        let outer = FreeElement::Tree(Tree::Node(b, vec![Tree::Node(c, vec![]), Tree::Node(d, vec![])]));
        assert_eq!(
            flat(&outer).unwrap(),
            FreeElement::Tree(Tree::Node('b', vec![Tree::Node('c', vec![]), Tree::Node('d', vec![])]))
        );
    }

    #[test]
    fn flat_tree_renumbers_outer_variables() {
        let f = FreeElement::Tree(Tree::Node('f', vec![Tree::Var(0), Tree::Var(1)]));
        let g = FreeElement::Tree(Tree::Node('g', vec![Tree::Var(0), Tree::Var(1)]));
        let outer = FreeElement::Tree(Tree::Node(f, vec![Tree::Node(g, vec![Tree::Var(0), Tree::Var(1)]), Tree::Var(2)]));
        let got = flat(&outer).unwrap();
        assert_eq!(
            got,
            FreeElement::Tree(Tree::Node(
                'f',
                vec![Tree::Node('g', vec![Tree::Var(0), Tree::Var(1)]), Tree::Var(2)]
            ))
        );
        assert_eq!(got.sort(), Sort(3));
    }

    #[test]
    fn flat_rejects_sort_mismatch() {
        let t = FreeElement::Up(UpWord::Lasso {
            prefix: vec![],
            period: vec![FreeElement::Up(lasso(w(""), w("a")))],
        });
        assert!(flat(&t).is_err());
        let b = FreeElement::Tree(Tree::Node('b', vec![Tree::Var(0), Tree::Var(1)]));
        let bad = FreeElement::Tree(Tree::Node(b, vec![Tree::Var(0)]));
        assert!(flat(&bad).is_err());
    }

    #[test]
    fn lasso_normal_form() {
        assert_eq!(lasso(w("ab"), w("abab")), lasso(w(""), w("ab")));
        assert_eq!(
            lasso(w("cab"), w("ab")),
            UpWord::Lasso { prefix: w("c"), period: w("ab") }
        );
        assert_eq!(
            lasso(w("b"), w("ab")),
            UpWord::Lasso { prefix: w(""), period: w("ba") }
        );
        let n = lasso(w("xy"), w("yy"));
        assert_eq!(n, UpWord::Lasso { prefix: w("x"), period: w("y") });
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn leq_free_examples() {
        let leq = |a: &char, b: &char| a <= b;
        let s = word("ab");
        assert!(leq_free(&s, &s, leq));
        assert!(!leq_free(&word("a"), &word("aa"), leq));
        assert!(leq_free(&word("ab"), &word("bb"), leq));
        assert!(!leq_free(&word("bb"), &word("ab"), leq));
        let x = FreeElement::Up(lasso(w("a"), w("ab")));
        let y = FreeElement::Up(lasso(w("b"), w("bb")));
        assert!(leq_free(&x, &y, leq));
        assert!(!leq_free(&y, &x, leq));
    }

    #[test]
    fn validate_checks_planarity() {
        let kind = MonadKind::Tree { max_arity: 3 };
        let ar = |c: &char| Sort(match c {
            'b' => 2,
            'u' => 1,
            _ => 0,
        });
        let ok = FreeElement::Tree(Tree::Node('b', vec![Tree::Var(0), Tree::Node('u', vec![Tree::Var(1)])]));
        assert!(ok.validate(kind, ar).is_ok());
        let swapped = FreeElement::Tree(Tree::Node('b', vec![Tree::Var(1), Tree::Var(0)]));
        assert!(swapped.validate(kind, ar).is_err());
        let wrong_arity = FreeElement::Tree(Tree::Node('b', vec![Tree::Var(0)]));
        assert!(wrong_arity.validate(kind, ar).is_err());
        assert!(FreeElement::<char>::Word(vec![]).validate(MonadKind::Word, |_| Sort::FINITE).is_err());
    }
}
