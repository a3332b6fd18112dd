//! Finite algebras for the three monads, given by shallow product tables.
//!
//! A word algebra is an ordered semigroup (`dot`). An omega algebra carries
//! `dot` on sort `1`, `mix: A1 × Ainf → Ainf` and `omega: A1 → Ainf`. A tree
//! algebra carries one composition table per way of filling the children of
//! an arity-`n` element: each child slot holds either an element or stays a
//! variable (`_`), and the result has sort equal to the number of variables
//! left over. Evaluation of deeper inputs recurses on these tables.

mod closure;
mod enumerate;
mod laws;
mod ops;
mod recognizer;
mod text;

pub use closure::{close, op_shape, Closure, Origin};
pub use enumerate::{semigroup_tables, semigroups};
pub use laws::{check_algebra_laws, check_algebra_laws_with, LawReport};
pub use ops::{
    congruence_violation, is_congruence_ordering, is_morphism, morphism_violation, product, quotient_algebra,
    restrict_sorts, subalgebra_generated, Morphism, Product,
};
pub use recognizer::{Alphabet, Recognizer};
pub use text::{format_algebra, parse_algebra};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monad::{FreeElement, MonadKind, Tree, UpWord};
use crate::order::{Elem, Sort, SortedOrderedSet};

/// The name of one shallow product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Dot,
    Mix,
    Omega,
    /// Composition at an element whose arity is the slot count; `None` keeps
    /// the variable, `Some(k)` plugs in an element of sort `k`.
    Comp(Vec<Option<Sort>>),
}

impl Symbol {
    /// Argument sorts and result sort.
    pub fn typing(&self) -> (Vec<Sort>, Sort) {
        match self {
            Symbol::Dot => (vec![Sort::FINITE, Sort::FINITE], Sort::FINITE),
            Symbol::Mix => (vec![Sort::FINITE, Sort::INFINITE], Sort::INFINITE),
            Symbol::Omega => (vec![Sort::FINITE], Sort::INFINITE),
            Symbol::Comp(slots) => {
                let mut args = vec![Sort(slots.len() as u8)];
                args.extend(slots.iter().flatten().copied());
                let result = slots.iter().map(|s| s.map_or(1, |k| k.arity())).sum::<usize>();
                (args, Sort(result as u8))
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Dot => f.write_str("dot"),
            Symbol::Mix => f.write_str("mix"),
            Symbol::Omega => f.write_str("omega"),
            Symbol::Comp(slots) => {
                f.write_str("comp[")?;
                for (i, s) in slots.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match s {
                        Some(k) => write!(f, "{k}")?,
                        None => f.write_str("_")?,
                    }
                }
                f.write_str("]")
            }
        }
    }
}

/// The shallow products available over the given sorts.
pub fn signature(kind: MonadKind, sorts: &[Sort]) -> Vec<Symbol> {
    let has = |s: Sort| sorts.contains(&s);
    let mut out = Vec::new();
    match kind {
        MonadKind::Word => {
            if has(Sort::FINITE) {
                out.push(Symbol::Dot);
            }
        }
        MonadKind::OmegaUp => {
            if has(Sort::FINITE) {
                out.push(Symbol::Dot);
                if has(Sort::INFINITE) {
                    out.push(Symbol::Mix);
                    out.push(Symbol::Omega);
                }
            }
        }
        MonadKind::Tree { max_arity } => {
            let choices: Vec<Option<Sort>> = std::iter::once(None)
                .chain((0..=max_arity).map(|k| Some(Sort(k))).filter(|s| has(s.unwrap())))
                .collect();
            for n in 1..=max_arity as usize {
                if !has(Sort(n as u8)) {
                    continue;
                }
                let mut idx = vec![0usize; n];
                loop {
                    let slots: Vec<Option<Sort>> = idx.iter().map(|&i| choices[i]).collect();
                    let sym = Symbol::Comp(slots);
                    let (_, result) = sym.typing();
                    let all_vars = idx.iter().all(|&i| i == 0);
                    if !all_vars && result.0 <= max_arity && has(result) {
                        out.push(sym);
                    }
                    // odometer, last slot fastest
                    let mut pos = n;
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < choices.len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                    if idx.iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// One shallow product with its dense table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    symbol: Symbol,
    args: Vec<Sort>,
    result: Sort,
    strides: Vec<usize>,
    table: Vec<Elem>,
}

impl Operation {
    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn args(&self) -> &[Sort] {
        &self.args
    }

    pub fn result(&self) -> Sort {
        self.result
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn cell_count(&self) -> usize {
        self.table.len()
    }

    fn cell(&self, carrier: &SortedOrderedSet, args: &[Elem]) -> usize {
        args.iter()
            .zip(&self.strides)
            .map(|(&a, &s)| carrier.local_index(a) * s)
            .sum()
    }

    /// Decodes a cell index into its argument tuple.
    pub fn cell_args(&self, carrier: &SortedOrderedSet, mut cell: usize) -> Vec<Elem> {
        let mut out = vec![0; self.args.len()];
        for i in (0..self.args.len()).rev() {
            let members = carrier.elements_of(self.args[i]);
            out[i] = members[cell % members.len()];
            cell /= members.len();
        }
        out
    }
}

/// A finite algebra: a sorted ordered carrier and shallow product tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAlgebra {
    kind: MonadKind,
    carrier: Arc<SortedOrderedSet>,
    ops: Vec<Operation>,
    index: HashMap<Symbol, usize>,
}

impl FinAlgebra {
    /// Builds an algebra from a product function and validates monotonicity
    /// and the associativity laws.
    pub fn new(
        kind: MonadKind,
        carrier: Arc<SortedOrderedSet>,
        f: impl FnMut(&Symbol, &[Elem]) -> Elem,
    ) -> Result<Self> {
        let alg = Self::from_fn(kind, carrier, f)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Builds an algebra without checking monotonicity or laws; only sorts
    /// and ranges are checked. Use [`check_algebra_laws`] to inspect it.
    pub fn from_fn(
        kind: MonadKind,
        carrier: Arc<SortedOrderedSet>,
        mut f: impl FnMut(&Symbol, &[Elem]) -> Elem,
    ) -> Result<Self> {
        for s in carrier.sorts() {
            if !kind.has_sort(*s) {
                return Err(Error::SortMismatch(format!("sort {s} is not a sort of the {} monad", kind.name())));
            }
        }
        let mut ops = Vec::new();
        let mut index = HashMap::new();
        for symbol in signature(kind, carrier.sorts()) {
            let (args, result) = symbol.typing();
            let sizes: Vec<usize> = args.iter().map(|s| carrier.elements_of(*s).len()).collect();
            let mut strides = vec![1; args.len()];
            for i in (0..args.len().saturating_sub(1)).rev() {
                strides[i] = strides[i + 1] * sizes[i + 1];
            }
            let cells: usize = sizes.iter().product();
            let mut op = Operation {
                symbol: symbol.clone(),
                args,
                result,
                strides,
                table: Vec::with_capacity(cells),
            };
            for cell in 0..cells {
                let a = op.cell_args(&carrier, cell);
                let r = f(&symbol, &a);
                if r >= carrier.len() || carrier.sort_of(r) != result {
                    let shown: Vec<&str> = a.iter().map(|&x| carrier.name(x)).collect();
                    return Err(Error::SortMismatch(format!(
                        "{symbol}({}) must be an element of sort {result}",
                        shown.join(", ")
                    )));
                }
                op.table.push(r);
            }
            index.insert(symbol, ops.len());
            ops.push(op);
        }
        Ok(FinAlgebra {
            kind,
            carrier,
            ops,
            index,
        })
    }

    /// Rejects the algebra if a product is not monotone or an exhaustive law
    /// instance fails.
    pub fn validate(&self) -> Result<()> {
        let report = laws::exhaustive(self, laws::EXHAUSTIVE_BUDGET);
        match report.violations.first() {
            Some(v) => Err(Error::LawViolation(v.clone())),
            None => Ok(()),
        }
    }

    /// The same algebra with new element names.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        Ok(FinAlgebra {
            carrier: Arc::new(self.carrier.renamed(names)?),
            ..self.clone()
        })
    }

    pub fn kind(&self) -> MonadKind {
        self.kind
    }

    pub fn carrier(&self) -> &Arc<SortedOrderedSet> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn name(&self, e: Elem) -> &str {
        self.carrier.name(e)
    }

    pub fn sort_of(&self, e: Elem) -> Sort {
        self.carrier.sort_of(e)
    }

    pub fn sorts(&self) -> &[Sort] {
        self.carrier.sorts()
    }

    pub fn elements_of(&self, sort: Sort) -> &[Elem] {
        self.carrier.elements_of(sort)
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op_index(&self, symbol: &Symbol) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    /// Applies operation `op` (an index into [`FinAlgebra::ops`]).
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let o = &self.ops[op];
        o.table[o.cell(&self.carrier, args)]
    }

    pub fn apply_symbol(&self, symbol: &Symbol, args: &[Elem]) -> Result<Elem> {
        let op = self
            .op_index(symbol)
            .ok_or_else(|| Error::SortMismatch(format!("no product {symbol} in this algebra")))?;
        let o = &self.ops[op];
        if args.len() != o.args.len() || args.iter().zip(&o.args).any(|(&a, &s)| self.sort_of(a) != s) {
            return Err(Error::SortMismatch(format!("bad arguments for {symbol}")));
        }
        Ok(self.apply(op, args))
    }

    pub fn dot(&self, a: Elem, b: Elem) -> Elem {
        self.apply(self.index[&Symbol::Dot], &[a, b])
    }

    pub fn mix(&self, a: Elem, e: Elem) -> Elem {
        self.apply(self.index[&Symbol::Mix], &[a, e])
    }

    pub fn omega(&self, a: Elem) -> Elem {
        self.apply(self.index[&Symbol::Omega], &[a])
    }

    /// Composition at `a`; `None` children stay variables.
    pub fn comp(&self, a: Elem, children: &[Option<Elem>]) -> Result<Elem> {
        if self.sort_of(a).arity() != children.len() {
            return Err(Error::SortMismatch(format!(
                "`{}` has arity {} but {} children were given",
                self.name(a),
                self.sort_of(a),
                children.len()
            )));
        }
        if children.iter().all(Option::is_none) {
            return Ok(a);
        }
        let slots = children.iter().map(|c| c.map(|e| self.sort_of(e))).collect();
        let mut args = vec![a];
        args.extend(children.iter().flatten().copied());
        self.apply_symbol(&Symbol::Comp(slots), &args)
    }

    /// The semigroup product of a nonempty sequence of sort-`1` elements.
    pub fn fold(&self, w: &[Elem]) -> Result<Elem> {
        let (&first, rest) = w
            .split_first()
            .ok_or_else(|| Error::SortMismatch("empty product".into()))?;
        let dot = self.op_index(&Symbol::Dot);
        let mut acc = first;
        for &x in rest {
            let dot = dot.ok_or_else(|| Error::SortMismatch("no sort-1 product".into()))?;
            acc = self.apply(dot, &[acc, x]);
        }
        Ok(acc)
    }

    /// The unique morphism extension of `beta`, applied to `t`.
    pub fn eval<L>(&self, t: &FreeElement<L>, beta: impl Fn(&L) -> Elem) -> Result<Elem> {
        let check = |l: &L, sort: Sort| -> Result<Elem> {
            let e = beta(l);
            if e >= self.len() {
                return Err(Error::Invalid("assignment out of range".into()));
            }
            if self.sort_of(e) != sort {
                return Err(Error::SortMismatch(format!(
                    "`{}` of sort {} at a sort-{sort} position",
                    self.name(e),
                    self.sort_of(e)
                )));
            }
            Ok(e)
        };
        let finite = |w: &[L]| -> Result<Vec<Elem>> { w.iter().map(|l| check(l, Sort::FINITE)).collect() };
        match (self.kind, t) {
            (MonadKind::Word, FreeElement::Word(w)) | (MonadKind::OmegaUp, FreeElement::Up(UpWord::Finite(w))) => {
                self.fold(&finite(w)?)
            }
            (MonadKind::OmegaUp, FreeElement::Up(UpWord::Lasso { prefix, period })) => {
                let e = self.omega(self.fold(&finite(period)?)?);
                if prefix.is_empty() {
                    Ok(e)
                } else {
                    Ok(self.mix(self.fold(&finite(prefix)?)?, e))
                }
            }
            (MonadKind::OmegaUp, FreeElement::Up(UpWord::Capped { prefix, last })) => {
                let e = check(last, Sort::INFINITE)?;
                if prefix.is_empty() {
                    Ok(e)
                } else {
                    Ok(self.mix(self.fold(&finite(prefix)?)?, e))
                }
            }
            (MonadKind::Tree { .. }, FreeElement::Tree(t @ Tree::Node(..))) => self.eval_tree(t, &check),
            _ => Err(Error::SortMismatch(format!(
                "cannot evaluate a {} element in a {} algebra",
                t.kind_name(),
                self.kind.name()
            ))),
        }
    }

    fn eval_tree<L>(&self, t: &Tree<L>, check: &impl Fn(&L, Sort) -> Result<Elem>) -> Result<Elem> {
        match t {
            Tree::Var(_) => Err(Error::SortMismatch("variable at the root".into())),
            Tree::Node(l, children) => {
                let a = check(l, Sort(children.len() as u8))?;
                let vals = children
                    .iter()
                    .map(|c| match c {
                        Tree::Var(_) => Ok(None),
                        node => self.eval_tree(node, check).map(Some),
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.comp(a, &vals)
            }
        }
    }

    /// Evaluates an element whose labels are carrier elements.
    pub fn eval_elements(&self, t: &FreeElement<Elem>) -> Result<Elem> {
        self.eval(t, |&e| e)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Integers modulo `n` under addition, as a word algebra.
    pub fn cyclic(n: usize) -> FinAlgebra {
        let carrier = Arc::new(SortedOrderedSet::discrete(Sort::FINITE, (0..n).map(|i| i.to_string())).unwrap());
        FinAlgebra::new(MonadKind::Word, carrier, |_, a| (a[0] + a[1]) % n).unwrap()
    }

    #[test]
    fn eval_parity() {
        let z2 = cyclic(2);
        let t = FreeElement::Word(vec!['a', 'a', 'a']);
        assert_eq!(z2.eval(&t, |_| 1).unwrap(), 1);
        assert_eq!(z2.eval(&FreeElement::Word(vec!['a']), |_| 1).unwrap(), 1);
    }

    #[test]
    fn signature_of_small_tree_kind() {
        let sorts = [Sort(0), Sort(1), Sort(2)];
        let sig = signature(MonadKind::Tree { max_arity: 2 }, &sorts);
        let shown: Vec<String> = sig.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            shown,
            [
                "comp[0]", "comp[1]", "comp[2]", "comp[_,0]", "comp[_,1]", "comp[0,_]", "comp[0,0]", "comp[0,1]",
                "comp[0,2]", "comp[1,_]", "comp[1,0]", "comp[1,1]", "comp[2,0]"
            ]
        );
    }

    #[test]
    fn eval_rejects_sort_mismatch() {
        let z2 = cyclic(2);
        let t = FreeElement::Up(UpWord::Finite(vec!['a']));
        assert!(z2.eval(&t, |_| 0).is_err());
    }
}
