use std::collections::HashMap;
use std::sync::Arc;

use super::{close, FinAlgebra};
use crate::error::{Error, Result};
use crate::monad::MonadKind;
use crate::order::{kernel, quotient_set, Elem, ElemSet, Preorder, Sort, SortedFunction, SortedOrderedSet};

/// A verified morphism between finite algebras.
#[derive(Clone, Debug)]
pub struct Morphism {
    source: Arc<FinAlgebra>,
    target: Arc<FinAlgebra>,
    map: SortedFunction,
}

impl Morphism {
    /// Checks monotonicity and compatibility with every product.
    pub fn new(source: Arc<FinAlgebra>, target: Arc<FinAlgebra>, map: Vec<Elem>) -> Result<Self> {
        let f = SortedFunction::new_unchecked_order(source.carrier().clone(), target.carrier().clone(), map)?;
        if let Some(msg) = morphism_violation(&f, &source, &target) {
            return Err(Error::Invalid(format!("not a morphism: {msg}")));
        }
        Ok(Morphism { source, target, map: f })
    }

    pub(crate) fn new_unchecked(source: Arc<FinAlgebra>, target: Arc<FinAlgebra>, map: SortedFunction) -> Self {
        Morphism { source, target, map }
    }

    pub fn source(&self) -> &Arc<FinAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &SortedFunction {
        &self.map
    }

    pub fn apply(&self, e: Elem) -> Elem {
        self.map.apply(e)
    }

    pub fn is_surjective(&self) -> bool {
        self.map.is_surjective()
    }

    pub fn kernel(&self) -> Preorder {
        kernel(&self.map)
    }

    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        let map = self.map.then(&next.map)?;
        Ok(Morphism::new_unchecked(self.source.clone(), next.target.clone(), map))
    }
}

/// True iff `phi` is monotone and commutes with every shallow product.
pub fn is_morphism(phi: &SortedFunction, a: &FinAlgebra, b: &FinAlgebra) -> bool {
    morphism_violation(phi, a, b).is_none()
}

/// The first reason `phi` fails to be a morphism.
pub fn morphism_violation(phi: &SortedFunction, a: &FinAlgebra, b: &FinAlgebra) -> Option<String> {
    if phi.domain().as_ref() != a.carrier().as_ref() || phi.codomain().as_ref() != b.carrier().as_ref() {
        return Some("map does not go between the carriers".into());
    }
    if a.kind() != b.kind() && !(a.sorts() == [Sort::FINITE] && b.sorts() == [Sort::FINITE]) {
        return Some(format!("algebras of different kinds ({} and {})", a.kind(), b.kind()));
    }
    if let Some((x, y)) = phi.monotonicity_violation() {
        return Some(format!("not monotone: `{}` <= `{}`", a.name(x), a.name(y)));
    }
    for op in a.ops() {
        let Some(target_op) = b.op_index(op.symbol()) else {
            return Some(format!("target has no product {}", op.symbol()));
        };
        for cell in 0..op.cell_count() {
            let args = op.cell_args(a.carrier(), cell);
            let lhs = phi.apply(op.table()[cell]);
            let mapped: Vec<Elem> = args.iter().map(|&x| phi.apply(x)).collect();
            let rhs = b.apply(target_op, &mapped);
            if lhs != rhs {
                let shown: Vec<&str> = args.iter().map(|&x| a.name(x)).collect();
                return Some(format!(
                    "{}({}) maps to `{}` but the product of the images is `{}`",
                    op.symbol(),
                    shown.join(", "),
                    b.name(lhs),
                    b.name(rhs)
                ));
            }
        }
    }
    None
}

/// A finite product with its tuple structure.
#[derive(Clone, Debug)]
pub struct Product {
    pub algebra: Arc<FinAlgebra>,
    pub factors: Vec<Arc<FinAlgebra>>,
    /// Component tuple of every element.
    pub components: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, Elem>,
}

impl Product {
    pub fn element(&self, tuple: &[Elem]) -> Option<Elem> {
        self.index.get(tuple).copied()
    }

    /// The `i`-th projection.
    pub fn projection(&self, i: usize) -> Morphism {
        let map = self.components.iter().map(|t| t[i]).collect();
        let f = SortedFunction::new(self.algebra.carrier().clone(), self.factors[i].carrier().clone(), map)
            .expect("projections are monotone");
        Morphism::new_unchecked(self.algebra.clone(), self.factors[i].clone(), f)
    }

    /// The pairing `a ↦ (f_1(a), ..., f_n(a))` of morphisms with a common source.
    pub fn pairing(&self, maps: &[&Morphism]) -> Result<Morphism> {
        let source = maps
            .first()
            .map(|m| m.source().clone())
            .ok_or_else(|| Error::Invalid("pairing needs at least one map".into()))?;
        if maps.len() != self.factors.len() {
            return Err(Error::Invalid("one map per factor is needed".into()));
        }
        let map = source
            .carrier()
            .elements()
            .map(|a| {
                let t: Vec<Elem> = maps.iter().map(|m| m.apply(a)).collect();
                self.element(&t).expect("tuples of same-sort elements exist")
            })
            .collect();
        Morphism::new(source, self.algebra.clone(), map)
    }
}

/// The componentwise product. The empty product has one element per sort.
pub fn product(kind: MonadKind, factors: &[Arc<FinAlgebra>]) -> Result<Product> {
    let sorts: Vec<Sort> = match factors.first() {
        Some(f) => f.sorts().to_vec(),
        None => kind.sorts(),
    };
    for f in factors {
        if f.kind() != kind || f.sorts() != sorts.as_slice() {
            return Err(Error::SortMismatch("product factors must share kind and sorts".into()));
        }
    }
    let mut builder = SortedOrderedSet::builder(sorts.iter().copied()).cap(usize::MAX);
    let mut components: Vec<Vec<Elem>> = Vec::new();
    let mut elem_sort = Vec::new();
    for &s in &sorts {
        let lists: Vec<&[Elem]> = factors.iter().map(|f| f.elements_of(s)).collect();
        for t in cartesian(&lists) {
            let name = match factors.len() {
                0 if sorts.len() == 1 => "()".to_owned(),
                0 => format!("(){s}"),
                1 => factors[0].name(t[0]).to_owned(),
                _ => {
                    let parts: Vec<&str> = t.iter().zip(factors).map(|(&e, f)| f.name(e)).collect();
                    format!("({})", parts.join(","))
                }
            };
            builder.element(name, s);
            components.push(t);
            elem_sort.push(s);
        }
    }
    for (i, a) in components.iter().enumerate() {
        for (j, b) in components.iter().enumerate() {
            if i != j && elem_sort[i] == elem_sort[j] && a.iter().zip(b).zip(factors).all(|((&x, &y), f)| f.carrier().leq(x, y)) {
                builder.leq(i, j);
            }
        }
    }
    let carrier = Arc::new(builder.build()?);
    let index: HashMap<Vec<Elem>, Elem> = components.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let algebra = FinAlgebra::from_fn(kind, carrier.clone(), |sym, args| {
        if factors.is_empty() {
            let (_, result) = sym.typing();
            return carrier.elements_of(result)[0];
        }
        let t: Vec<Elem> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let a: Vec<Elem> = args.iter().map(|&x| components[x][i]).collect();
                f.apply(f.op_index(sym).expect("factors share the signature"), &a)
            })
            .collect();
        index[&t]
    })?;
    Ok(Product {
        algebra: Arc::new(algebra),
        factors: factors.to_vec(),
        components,
        index,
    })
}

fn cartesian(lists: &[&[Elem]]) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |&x| {
                    let mut t = prefix.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// The least subset containing `gens` and closed under all products, with
/// its inclusion. Element names and order are inherited.
pub fn subalgebra_generated(alg: &Arc<FinAlgebra>, gens: &ElemSet) -> Result<(Arc<FinAlgebra>, Morphism)> {
    let closure = close(
        alg.kind(),
        alg.sorts(),
        gens.iter().map(|&e| (e, alg.sort_of(e))).collect(),
        |sym, args| {
            let a: Vec<Elem> = args.iter().map(|&&x| x).collect();
            alg.apply_symbol(sym, &a)
        },
        |&x, &y| alg.carrier().leq(x, y),
        |&x, _| alg.name(x).to_owned(),
        usize::MAX,
    )?;
    let sub = Arc::new(closure.algebra);
    let inclusion = SortedFunction::new(sub.carrier().clone(), alg.carrier().clone(), closure.keys)?;
    Ok((sub.clone(), Morphism::new_unchecked(sub, alg.clone(), inclusion)))
}

/// True iff `q` extends the order and is compatible with every product.
pub fn is_congruence_ordering(alg: &FinAlgebra, q: &Preorder) -> bool {
    congruence_violation(alg, q).is_none()
}

/// A witness that `q` is not a congruence ordering. Compatibility is checked
/// one argument at a time; transitivity of `q` gives the rest.
pub fn congruence_violation(alg: &FinAlgebra, q: &Preorder) -> Option<String> {
    if q.carrier().as_ref() != alg.carrier().as_ref() {
        return Some("preorder lives on a different carrier".into());
    }
    if let Some((a, b)) = alg.carrier().strict_pairs().into_iter().find(|&(a, b)| !q.holds(a, b)) {
        return Some(format!("`{}` <= `{}` in the carrier but not in the preorder", alg.name(a), alg.name(b)));
    }
    for (o, op) in alg.ops().iter().enumerate() {
        for cell in 0..op.cell_count() {
            let args = op.cell_args(alg.carrier(), cell);
            let r = op.table()[cell];
            for i in 0..args.len() {
                for &b in alg.elements_of(op.args()[i]) {
                    if b == args[i] || !q.holds(args[i], b) {
                        continue;
                    }
                    let mut moved = args.clone();
                    moved[i] = b;
                    let s = alg.apply(o, &moved);
                    if !q.holds(r, s) {
                        let show = |xs: &[Elem]| xs.iter().map(|&x| alg.name(x)).collect::<Vec<_>>().join(", ");
                        return Some(format!(
                            "`{}` ⊑ `{}` but {}({}) = `{}` is not below {}({}) = `{}`",
                            alg.name(args[i]),
                            alg.name(b),
                            op.symbol(),
                            show(&args),
                            alg.name(r),
                            op.symbol(),
                            show(&moved),
                            alg.name(s)
                        ));
                    }
                }
            }
        }
    }
    None
}

/// The quotient by a congruence ordering and the quotient morphism.
pub fn quotient_algebra(alg: &Arc<FinAlgebra>, q: &Preorder) -> Result<(Arc<FinAlgebra>, Morphism)> {
    if let Some(msg) = congruence_violation(alg, q) {
        return Err(Error::NotCongruence(msg));
    }
    let (classes, map) = quotient_set(alg.carrier(), q)?;
    let mut rep = vec![usize::MAX; classes.len()];
    for a in alg.carrier().elements() {
        if rep[map.apply(a)] == usize::MAX {
            rep[map.apply(a)] = a;
        }
    }
    let quotient = FinAlgebra::from_fn(alg.kind(), classes, |sym, args| {
        let a: Vec<Elem> = args.iter().map(|&c| rep[c]).collect();
        map.apply(alg.apply_symbol(sym, &a).expect("same signature"))
    })?;
    let quotient = Arc::new(quotient);
    let map = SortedFunction::new(alg.carrier().clone(), quotient.carrier().clone(), map.table().to_vec())?;
    Ok((quotient.clone(), Morphism::new_unchecked(alg.clone(), quotient, map)))
}

/// Keeps only the sorts in `delta` and the products among them. An omega
/// algebra restricted to sort `1` becomes a word algebra.
pub fn restrict_sorts(alg: &FinAlgebra, delta: &[Sort]) -> Result<FinAlgebra> {
    let sorts: Vec<Sort> = alg.sorts().iter().copied().filter(|s| delta.contains(s)).collect();
    let kind = match alg.kind() {
        MonadKind::OmegaUp if sorts == [Sort::FINITE] => MonadKind::Word,
        k => k,
    };
    let mut builder = SortedOrderedSet::builder(sorts.iter().copied()).cap(usize::MAX);
    let mut old = Vec::new();
    let mut new_of = vec![usize::MAX; alg.len()];
    for e in alg.carrier().elements() {
        if sorts.contains(&alg.sort_of(e)) {
            new_of[e] = builder.element(alg.name(e), alg.sort_of(e));
            old.push(e);
        }
    }
    for (a, b) in alg.carrier().strict_pairs() {
        if new_of[a] != usize::MAX {
            builder.leq(new_of[a], new_of[b]);
        }
    }
    let carrier = Arc::new(builder.build()?);
    FinAlgebra::from_fn(kind, carrier, |sym, args| {
        let a: Vec<Elem> = args.iter().map(|&x| old[x]).collect();
        new_of[alg.apply_symbol(sym, &a).expect("restricted signature")]
    })
}
