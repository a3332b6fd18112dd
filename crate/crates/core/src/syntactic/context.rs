use std::fmt;

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::monad::{flat, parse_pattern, sing, FreeElement, MonadKind, Slot, Tree, UpWord};
use crate::order::{Elem, Sort};

/// An element of `M(Σ + □)` with at least one hole. Every hole has the same
/// sort and receives the same value when the context is applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context<L> {
    body: FreeElement<Slot<L>>,
    hole: Sort,
}

impl<L: Clone + PartialEq> Context<L> {
    pub fn new(body: FreeElement<Slot<L>>) -> Result<Self> {
        let mut sorts = Vec::new();
        hole_sorts(&body, &mut sorts);
        let hole = *sorts
            .first()
            .ok_or_else(|| Error::Invalid("a context needs a hole `_`".into()))?;
        if sorts.iter().any(|&s| s != hole) {
            return Err(Error::SortMismatch("holes of different sorts".into()));
        }
        Ok(Context { body, hole })
    }

    /// The bare hole `□` of the given sort.
    pub fn identity(kind: MonadKind, sort: Sort) -> Result<Self> {
        Ok(Context {
            body: sing(kind, Slot::Hole, sort)?,
            hole: sort,
        })
    }

    pub fn hole_sort(&self) -> Sort {
        self.hole
    }

    pub fn result_sort(&self) -> Sort {
        self.body.sort()
    }

    pub fn body(&self) -> &FreeElement<Slot<L>> {
        &self.body
    }

    pub fn is_identity(&self) -> bool {
        match &self.body {
            FreeElement::Word(w) | FreeElement::Up(UpWord::Finite(w)) => w.len() == 1,
            FreeElement::Up(UpWord::Capped { prefix, .. }) => prefix.is_empty(),
            FreeElement::Up(UpWord::Lasso { .. }) => false,
            FreeElement::Tree(Tree::Node(Slot::Hole, children)) => children.iter().all(|c| matches!(c, Tree::Var(_))),
            FreeElement::Tree(_) => false,
        }
    }

    /// `p[t]`: `t` substituted for every hole.
    pub fn plug(&self, t: &FreeElement<L>) -> Result<FreeElement<L>> {
        if t.sort() != self.hole {
            return Err(Error::SortMismatch(format!(
                "a sort-{} element in a sort-{} hole",
                t.sort(),
                self.hole
            )));
        }
        let kind = kind_of(&self.body);
        let nested = self.body.try_map(|s| match s {
            Slot::Label(l) => sing(kind, l.clone(), label_sort(&self.body, l)),
            Slot::Hole => Ok(t.clone()),
        })?;
        flat(&nested)
    }

    /// `self ∘ inner`, the context `self[inner]`.
    pub fn compose(&self, inner: &Context<L>) -> Result<Context<L>> {
        if inner.result_sort() != self.hole {
            return Err(Error::SortMismatch(format!(
                "a sort-{} context in a sort-{} hole",
                inner.result_sort(),
                self.hole
            )));
        }
        let kind = kind_of(&self.body);
        let nested = self.body.try_map(|s| match s {
            Slot::Label(l) => sing(kind, Slot::Label(l.clone()), label_sort(&self.body, l)),
            Slot::Hole => Ok(inner.body.clone()),
        })?;
        Ok(Context {
            body: flat(&nested)?,
            hole: inner.hole,
        })
    }

    pub fn map<M: Clone + PartialEq>(&self, mut f: impl FnMut(&L) -> M) -> Context<M> {
        Context {
            body: self.body.map(|s| match s {
                Slot::Label(l) => Slot::Label(f(l)),
                Slot::Hole => Slot::Hole,
            }),
            hole: self.hole,
        }
    }

    /// Replaces every label by a free element, e.g. an element by a term.
    pub fn substitute<M: Clone + PartialEq>(&self, mut f: impl FnMut(&L) -> FreeElement<M>) -> Result<Context<M>> {
        let kind = kind_of(&self.body);
        let hole = self.hole;
        let nested = self.body.try_map(|s| match s {
            Slot::Label(l) => Ok(f(l).map(|m| Slot::Label(m.clone()))),
            Slot::Hole => sing(kind, Slot::Hole, hole),
        })?;
        Ok(Context { body: flat(&nested)?, hole })
    }
}

impl Context<String> {
    pub fn parse(kind: MonadKind, text: &str) -> Result<Self> {
        Context::new(parse_pattern(kind, text)?)
    }
}

impl<L: fmt::Display> fmt::Display for Context<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

/// `p[a]` in `alg`, reading labels through `beta`.
pub fn context_apply<L: Clone + PartialEq>(
    alg: &FinAlgebra,
    p: &Context<L>,
    beta: impl Fn(&L) -> Elem,
    a: Elem,
) -> Result<Elem> {
    if alg.sort_of(a) != p.hole_sort() {
        return Err(Error::SortMismatch(format!(
            "`{}` has sort {} but the hole has sort {}",
            alg.name(a),
            alg.sort_of(a),
            p.hole_sort()
        )));
    }
    alg.eval(p.body(), |s| match s {
        Slot::Label(l) => beta(l),
        Slot::Hole => a,
    })
}

/// `pq := p[q]`.
pub fn context_compose<L: Clone + PartialEq>(p: &Context<L>, q: &Context<L>) -> Result<Context<L>> {
    p.compose(q)
}

fn kind_of<L>(t: &FreeElement<L>) -> MonadKind {
    match t {
        FreeElement::Word(_) => MonadKind::Word,
        FreeElement::Up(_) => MonadKind::OmegaUp,
        FreeElement::Tree(t) => MonadKind::Tree {
            max_arity: max_arity(t).max(crate::monad::DEFAULT_MAX_ARITY as usize) as u8,
        },
    }
}

fn max_arity<L>(t: &Tree<L>) -> usize {
    match t {
        Tree::Var(_) => 0,
        Tree::Node(_, cs) => cs.iter().map(max_arity).max().unwrap_or(0).max(cs.len()),
    }
}

/// Sort of the first occurrence of `l` in `t`. Labels of words are sort `1`.
fn label_sort<L: PartialEq>(t: &FreeElement<Slot<L>>, l: &L) -> Sort {
    fn in_tree<L: PartialEq>(t: &Tree<Slot<L>>, l: &L) -> Option<Sort> {
        match t {
            Tree::Var(_) => None,
            Tree::Node(s, cs) => {
                if matches!(s, Slot::Label(m) if m == l) {
                    return Some(Sort(cs.len() as u8));
                }
                cs.iter().find_map(|c| in_tree(c, l))
            }
        }
    }
    match t {
        FreeElement::Word(_) => Sort::FINITE,
        FreeElement::Up(UpWord::Capped { prefix, last }) => {
            if matches!(last, Slot::Label(m) if m == l) && !prefix.iter().any(|s| matches!(s, Slot::Label(m) if m == l)) {
                Sort::INFINITE
            } else {
                Sort::FINITE
            }
        }
        FreeElement::Up(_) => Sort::FINITE,
        FreeElement::Tree(t) => in_tree(t, l).unwrap_or(Sort(0)),
    }
}

fn hole_sorts<L>(t: &FreeElement<Slot<L>>, out: &mut Vec<Sort>) {
    fn in_tree<L>(t: &Tree<Slot<L>>, out: &mut Vec<Sort>) {
        if let Tree::Node(s, cs) = t {
            if matches!(s, Slot::Hole) {
                out.push(Sort(cs.len() as u8));
            }
            cs.iter().for_each(|c| in_tree(c, out));
        }
    }
    let finite = |w: &[Slot<L>], out: &mut Vec<Sort>| {
        out.extend(w.iter().filter(|s| matches!(s, Slot::Hole)).map(|_| Sort::FINITE));
    };
    match t {
        FreeElement::Word(w) | FreeElement::Up(UpWord::Finite(w)) => finite(w, out),
        FreeElement::Up(UpWord::Lasso { prefix, period }) => {
            finite(prefix, out);
            finite(period, out);
        }
        FreeElement::Up(UpWord::Capped { prefix, last }) => {
            finite(prefix, out);
            if matches!(last, Slot::Hole) {
                out.push(Sort::INFINITE);
            }
        }
        FreeElement::Tree(t) => in_tree(t, out),
    }
}
