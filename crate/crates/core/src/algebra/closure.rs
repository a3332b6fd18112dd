use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use super::{signature, FinAlgebra, Symbol};
use crate::error::{Error, Result};
use crate::monad::{flat, lasso, FreeElement, MonadKind, Tree, UpWord};
use crate::order::{Elem, Sort, SortedOrderedSet};

/// How an element of a closure was first obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Generator(usize),
    Op(Symbol, Vec<Elem>),
}

/// The algebra generated inside some ambient structure, with the ambient
/// value behind each element and how it was reached.
#[derive(Clone, Debug)]
pub struct Closure<K> {
    pub algebra: FinAlgebra,
    pub keys: Vec<K>,
    /// Element reached by each generator.
    pub generators: Vec<Elem>,
    pub origins: Vec<Origin>,
}

impl<K> Closure<K> {
    /// A term for every element, built from `labels[i]` for generator `i`.
    /// Elements reached in earlier rounds get shorter terms.
    pub fn witnesses<L: Clone + PartialEq>(&self, labels: &[FreeElement<L>]) -> Result<Vec<FreeElement<L>>> {
        let mut out: Vec<FreeElement<L>> = Vec::with_capacity(self.origins.len());
        for origin in &self.origins {
            let t = match origin {
                Origin::Generator(i) => labels[*i].clone(),
                Origin::Op(symbol, args) => {
                    let parts = args.iter().map(|&a| out[a].clone()).collect();
                    flat(&op_shape(self.algebra.kind(), symbol, parts))?
                }
            };
            out.push(t);
        }
        Ok(out)
    }
}

/// Closes `generators` under all shallow products. `apply` computes products
/// of ambient values and `leq` orders them; the result must be antisymmetric.
/// Elements are numbered in discovery order, breadth first.
pub fn close<K: Clone + Eq + Hash>(
    kind: MonadKind,
    sorts: &[Sort],
    generators: Vec<(K, Sort)>,
    mut apply: impl FnMut(&Symbol, &[&K]) -> Result<K>,
    leq: impl Fn(&K, &K) -> bool,
    name: impl Fn(&K, usize) -> String,
    cap: usize,
) -> Result<Closure<K>> {
    let symbols = signature(kind, sorts);
    let sort_pos = |s: Sort| sorts.iter().position(|&t| t == s);
    let mut keys: Vec<K> = Vec::new();
    let mut sort_of: Vec<Sort> = Vec::new();
    let mut origins = Vec::new();
    let mut seen: HashMap<K, Elem> = HashMap::new();
    let mut by_sort: Vec<Vec<Elem>> = vec![Vec::new(); sorts.len()];
    let mut gen_elems = Vec::new();

    let mut add = |k: K, s: Sort, origin: Origin, keys: &mut Vec<K>, by_sort: &mut Vec<Vec<Elem>>| -> Result<Elem> {
        if let Some(&e) = seen.get(&k) {
            return Ok(e);
        }
        let p = sort_pos(s).ok_or_else(|| Error::SortMismatch(format!("undeclared sort {s}")))?;
        if by_sort[p].len() >= cap {
            return Err(Error::CarrierTooLarge {
                sort: s,
                size: by_sort[p].len() + 1,
                cap,
            });
        }
        let e = keys.len();
        seen.insert(k.clone(), e);
        keys.push(k);
        sort_of.push(s);
        origins.push(origin);
        by_sort[p].push(e);
        Ok(e)
    };

    for (i, (k, s)) in generators.into_iter().enumerate() {
        let e = add(k, s, Origin::Generator(i), &mut keys, &mut by_sort)?;
        gen_elems.push(e);
    }

    let typings: Vec<(Vec<usize>, Sort)> = symbols
        .iter()
        .map(|sym| {
            let (args, result) = sym.typing();
            (args.iter().map(|&s| sort_pos(s).unwrap()).collect(), result)
        })
        .collect();
    let mut memo: Vec<HashMap<Vec<Elem>, Elem>> = vec![HashMap::new(); symbols.len()];
    // elements with local index below `done` in every argument were combined already
    let mut done = vec![0usize; sorts.len()];
    loop {
        let snapshot: Vec<usize> = by_sort.iter().map(Vec::len).collect();
        if snapshot == done {
            break;
        }
        for (o, sym) in symbols.iter().enumerate() {
            let (arg_pos, result) = &typings[o];
            let sizes: Vec<usize> = arg_pos.iter().map(|&p| snapshot[p]).collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut idx = vec![0usize; sizes.len()];
            loop {
                let fresh = idx.iter().zip(arg_pos).any(|(&i, &p)| i >= done[p]);
                if fresh {
                    let args: Vec<Elem> = idx.iter().zip(arg_pos).map(|(&i, &p)| by_sort[p][i]).collect();
                    let refs: Vec<&K> = args.iter().map(|&a| &keys[a]).collect();
                    let k = apply(sym, &refs)?;
                    let e = add(k, *result, Origin::Op(sym.clone(), args.clone()), &mut keys, &mut by_sort)?;
                    memo[o].insert(args, e);
                }
                let mut pos = sizes.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < sizes[pos] {
                        break;
                    }
                    idx[pos] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        done = snapshot;
    }

    let mut builder = SortedOrderedSet::builder(sorts.iter().copied()).cap(usize::MAX);
    for (i, k) in keys.iter().enumerate() {
        builder.element(name(k, i), sort_of[i]);
    }
    for a in 0..keys.len() {
        for b in 0..keys.len() {
            if a != b && sort_of[a] == sort_of[b] && leq(&keys[a], &keys[b]) {
                builder.leq(a, b);
            }
        }
    }
    let carrier = Arc::new(builder.build()?);
    let algebra = FinAlgebra::from_fn(kind, carrier, |sym, args| {
        let o = symbols.iter().position(|s| s == sym).expect("signature is fixed");
        memo[o][args]
    })?;
    Ok(Closure {
        algebra,
        keys,
        generators: gen_elems,
        origins,
    })
}

/// The depth-one free element whose evaluation is the product `symbol(args)`.
pub fn op_shape<L: PartialEq>(kind: MonadKind, symbol: &Symbol, args: Vec<L>) -> FreeElement<L> {
    let mut args = args.into_iter();
    match symbol {
        Symbol::Dot => {
            let w: Vec<L> = args.collect();
            match kind {
                MonadKind::Word => FreeElement::Word(w),
                _ => FreeElement::Up(UpWord::Finite(w)),
            }
        }
        Symbol::Mix => {
            let a = args.next().expect("mix has two arguments");
            let e = args.next().expect("mix has two arguments");
            FreeElement::Up(UpWord::Capped { prefix: vec![a], last: e })
        }
        Symbol::Omega => FreeElement::Up(lasso(Vec::new(), args.collect())),
        Symbol::Comp(slots) => {
            let root = args.next().expect("composition has a root");
            let mut next = 0;
            let children = slots
                .iter()
                .map(|s| match s {
                    None => {
                        next += 1;
                        Tree::Var(next - 1)
                    }
                    Some(k) => {
                        let b = args.next().expect("one argument per filled slot");
                        let t = Tree::Node(b, (next..next + k.arity()).map(Tree::Var).collect());
                        next += k.arity();
                        t
                    }
                })
                .collect();
            FreeElement::Tree(Tree::Node(root, children))
        }
    }
}
