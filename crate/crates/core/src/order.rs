//! Finite sorted ordered sets, monotone sorted maps and preorders.
//!
//! Everything here is dense: a carrier with `n` elements stores its order as an
//! `n * n` boolean table, and elements of distinct sorts are never related.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default maximal number of elements per sort.
pub const DEFAULT_SORT_CAP: usize = 64;

/// A sort identifier. Words use the single sort `1`, omega-words use `1` and
/// `inf`, and finite trees use their arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(pub u8);

impl Sort {
    pub const FINITE: Sort = Sort(1);
    pub const INFINITE: Sort = Sort(u8::MAX);

    pub fn arity(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Sort::INFINITE {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Sort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "∞" | "w" => Ok(Sort::INFINITE),
            _ => s
                .parse::<u8>()
                .ok()
                .filter(|&n| n != u8::MAX)
                .map(Sort)
                .ok_or_else(|| Error::Invalid(format!("unknown sort `{s}`"))),
        }
    }
}

/// Global element index into a [`SortedOrderedSet`].
pub type Elem = usize;

/// A set of elements.
pub type ElemSet = BTreeSet<Elem>;

/// A finite carrier partitioned by sort, each sort a finite partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedOrderedSet {
    sorts: Vec<Sort>,
    names: Vec<String>,
    sort_of: Vec<Sort>,
    members: Vec<Vec<Elem>>,
    local: Vec<usize>,
    leq: Vec<bool>,
    by_name: HashMap<String, Elem>,
}

/// Incremental constructor for [`SortedOrderedSet`].
#[derive(Clone, Debug)]
pub struct SortedSetBuilder {
    sorts: Vec<Sort>,
    elems: Vec<(String, Sort)>,
    pairs: Vec<(Elem, Elem)>,
    cap: usize,
}

impl SortedSetBuilder {
    pub fn new(sorts: impl IntoIterator<Item = Sort>) -> Self {
        let mut sorts: Vec<Sort> = sorts.into_iter().collect();
        sorts.sort();
        sorts.dedup();
        SortedSetBuilder {
            sorts,
            elems: Vec::new(),
            pairs: Vec::new(),
            cap: DEFAULT_SORT_CAP,
        }
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Adds an element and returns its index.
    pub fn element(&mut self, name: impl Into<String>, sort: Sort) -> Elem {
        self.elems.push((name.into(), sort));
        self.elems.len() - 1
    }

    /// Records `a <= b`; the reflexive-transitive closure is taken on build.
    pub fn leq(&mut self, a: Elem, b: Elem) -> &mut Self {
        self.pairs.push((a, b));
        self
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn build(self) -> Result<SortedOrderedSet> {
        let n = self.elems.len();
        let mut members = vec![Vec::new(); self.sorts.len()];
        let mut local = vec![0; n];
        let mut by_name = HashMap::with_capacity(n);
        for (e, (name, sort)) in self.elems.iter().enumerate() {
            let idx = self.sorts.binary_search(sort).map_err(|_| {
                Error::SortMismatch(format!("`{name}` has undeclared sort {sort}"))
            })?;
            local[e] = members[idx].len();
            members[idx].push(e);
            if by_name.insert(name.clone(), e).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (i, m) in members.iter().enumerate() {
            if m.len() > self.cap {
                return Err(Error::CarrierTooLarge {
                    sort: self.sorts[i],
                    size: m.len(),
                    cap: self.cap,
                });
            }
        }
        let mut leq = vec![false; n * n];
        for e in 0..n {
            leq[e * n + e] = true;
        }
        for &(a, b) in &self.pairs {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("order pair ({a}, {b}) out of range")));
            }
            if self.elems[a].1 != self.elems[b].1 {
                return Err(Error::SortMismatch(format!(
                    "`{}` and `{}` have different sorts",
                    self.elems[a].0, self.elems[b].0
                )));
            }
            leq[a * n + b] = true;
        }
        transitive_closure(&mut leq, n);
        for a in 0..n {
            for b in a + 1..n {
                if leq[a * n + b] && leq[b * n + a] {
                    return Err(Error::NotAntisymmetric(
                        self.elems[a].0.clone(),
                        self.elems[b].0.clone(),
                    ));
                }
            }
        }
        let (names, sort_of) = self.elems.into_iter().unzip();
        Ok(SortedOrderedSet {
            sorts: self.sorts,
            names,
            sort_of,
            members,
            local,
            leq,
            by_name,
        })
    }
}

pub(crate) fn transitive_closure(rel: &mut [bool], n: usize) {
    for k in 0..n {
        for i in 0..n {
            if !rel[i * n + k] {
                continue;
            }
            for j in 0..n {
                if rel[k * n + j] {
                    rel[i * n + j] = true;
                }
            }
        }
    }
}

impl SortedOrderedSet {
    pub fn builder(sorts: impl IntoIterator<Item = Sort>) -> SortedSetBuilder {
        SortedSetBuilder::new(sorts)
    }

    /// A discretely ordered set with the given names, all of one sort.
    pub fn discrete<S: Into<String>>(sort: Sort, names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut b = SortedSetBuilder::new([sort]);
        for name in names {
            b.element(name, sort);
        }
        b.build()
    }

    /// A chain `names[0] < names[1] < ...` of one sort.
    pub fn chain<S: Into<String>>(sort: Sort, names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut b = SortedSetBuilder::new([sort]);
        for name in names {
            b.element(name, sort);
        }
        for e in 1..b.len() {
            b.leq(e - 1, e);
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn has_sort(&self, sort: Sort) -> bool {
        self.sorts.binary_search(&sort).is_ok()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    /// Elements of one sort in index order; empty for unknown sorts.
    pub fn elements_of(&self, sort: Sort) -> &[Elem] {
        match self.sorts.binary_search(&sort) {
            Ok(i) => &self.members[i],
            Err(_) => &[],
        }
    }

    pub fn sort_of(&self, e: Elem) -> Sort {
        self.sort_of[e]
    }

    /// Position of `e` within the element list of its sort.
    pub fn local_index(&self, e: Elem) -> usize {
        self.local[e]
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn lookup(&self, name: &str) -> Option<Elem> {
        self.by_name.get(name).copied()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.len() + b]
    }

    /// True when the order is equality.
    pub fn is_discrete(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| a == b || !self.leq[a * n + b]))
    }

    /// Direct `(a, b)` pairs with `a < b`, for serialisation.
    pub fn strict_pairs(&self) -> Vec<(Elem, Elem)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a * n + b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The same ordered set with new element names.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(Error::Invalid("one name per element is needed".into()));
        }
        let mut by_name = HashMap::with_capacity(names.len());
        for (e, n) in names.iter().enumerate() {
            if by_name.insert(n.clone(), e).is_some() {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        Ok(SortedOrderedSet {
            names,
            by_name,
            ..self.clone()
        })
    }

    pub fn format_set(&self, set: &ElemSet) -> String {
        let names: Vec<&str> = set.iter().map(|&e| self.name(e)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Upward closure `{b : a <= b for some a in X}`.
pub fn upward_closure(set: &SortedOrderedSet, xs: &ElemSet) -> ElemSet {
    set.elements()
        .filter(|&b| xs.iter().any(|&a| set.leq(a, b)))
        .collect()
}

pub fn is_upward_closed(set: &SortedOrderedSet, xs: &ElemSet) -> bool {
    upward_closure(set, xs) == *xs
}

/// The same elements with the discrete order.
pub fn strip_order(set: &SortedOrderedSet) -> SortedOrderedSet {
    let n = set.len();
    let mut out = set.clone();
    out.leq = vec![false; n * n];
    for e in 0..n {
        out.leq[e * n + e] = true;
    }
    out
}

/// A sort-preserving map between two sorted ordered sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedFunction {
    domain: Arc<SortedOrderedSet>,
    codomain: Arc<SortedOrderedSet>,
    map: Vec<Elem>,
}

impl SortedFunction {
    /// Builds the map, checking that it is total, sort-preserving and monotone.
    pub fn new(
        domain: Arc<SortedOrderedSet>,
        codomain: Arc<SortedOrderedSet>,
        map: Vec<Elem>,
    ) -> Result<Self> {
        let f = Self::new_unchecked_order(domain, codomain, map)?;
        if let Some((a, b)) = f.monotonicity_violation() {
            return Err(Error::NotMonotone(
                f.domain.name(a).to_owned(),
                f.domain.name(b).to_owned(),
            ));
        }
        Ok(f)
    }

    /// Like [`SortedFunction::new`] but does not check monotonicity.
    pub fn new_unchecked_order(
        domain: Arc<SortedOrderedSet>,
        codomain: Arc<SortedOrderedSet>,
        map: Vec<Elem>,
    ) -> Result<Self> {
        if map.len() != domain.len() {
            return Err(Error::Invalid(format!(
                "map has {} entries for a domain of {} elements",
                map.len(),
                domain.len()
            )));
        }
        for (a, &b) in map.iter().enumerate() {
            if b >= codomain.len() {
                return Err(Error::Invalid(format!("image of `{}` out of range", domain.name(a))));
            }
            if domain.sort_of(a) != codomain.sort_of(b) {
                return Err(Error::SortMismatch(format!(
                    "`{}` of sort {} mapped to `{}` of sort {}",
                    domain.name(a),
                    domain.sort_of(a),
                    codomain.name(b),
                    codomain.sort_of(b)
                )));
            }
        }
        Ok(SortedFunction {
            domain,
            codomain,
            map,
        })
    }

    pub fn identity(set: Arc<SortedOrderedSet>) -> Self {
        let map = set.elements().collect();
        SortedFunction {
            domain: set.clone(),
            codomain: set,
            map,
        }
    }

    pub fn domain(&self) -> &Arc<SortedOrderedSet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SortedOrderedSet> {
        &self.codomain
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.map[a]
    }

    pub fn table(&self) -> &[Elem] {
        &self.map
    }

    pub fn monotonicity_violation(&self) -> Option<(Elem, Elem)> {
        let d = &self.domain;
        for a in d.elements() {
            for b in d.elements() {
                if d.leq(a, b) && !self.codomain.leq(self.map[a], self.map[b]) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    pub fn is_surjective(&self) -> bool {
        self.missing_image().is_none()
    }

    fn missing_image(&self) -> Option<Elem> {
        let mut hit = vec![false; self.codomain.len()];
        for &b in &self.map {
            hit[b] = true;
        }
        hit.iter().position(|h| !h)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &SortedFunction) -> Result<SortedFunction> {
        if self.codomain.as_ref() != then.domain.as_ref() {
            return Err(Error::Invalid("composition of incompatible maps".into()));
        }
        Ok(SortedFunction {
            domain: self.domain.clone(),
            codomain: then.codomain.clone(),
            map: self.map.iter().map(|&b| then.map[b]).collect(),
        })
    }
}

/// A sort-respecting preorder on a carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preorder {
    carrier: Arc<SortedOrderedSet>,
    rel: Vec<bool>,
}

impl Preorder {
    /// Takes the reflexive-transitive closure of `pairs`.
    pub fn generated_by(
        carrier: Arc<SortedOrderedSet>,
        pairs: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Self> {
        let n = carrier.len();
        let mut rel = vec![false; n * n];
        for e in 0..n {
            rel[e * n + e] = true;
        }
        for (a, b) in pairs {
            if carrier.sort_of(a) != carrier.sort_of(b) {
                return Err(Error::SortMismatch(format!(
                    "`{}` and `{}` have different sorts",
                    carrier.name(a),
                    carrier.name(b)
                )));
            }
            rel[a * n + b] = true;
        }
        transitive_closure(&mut rel, n);
        Ok(Preorder { carrier, rel })
    }

    /// Wraps a dense relation table, validating the preorder axioms.
    pub fn from_table(carrier: Arc<SortedOrderedSet>, rel: Vec<bool>) -> Result<Self> {
        let n = carrier.len();
        if rel.len() != n * n {
            return Err(Error::Invalid("relation table has the wrong size".into()));
        }
        for a in 0..n {
            if !rel[a * n + a] {
                return Err(Error::Invalid(format!("not reflexive at `{}`", carrier.name(a))));
            }
            for b in 0..n {
                if rel[a * n + b] && carrier.sort_of(a) != carrier.sort_of(b) {
                    return Err(Error::SortMismatch(format!(
                        "`{}` and `{}` related across sorts",
                        carrier.name(a),
                        carrier.name(b)
                    )));
                }
                for c in 0..n {
                    if rel[a * n + b] && rel[b * n + c] && !rel[a * n + c] {
                        return Err(Error::Invalid(format!(
                            "not transitive at `{}`, `{}`, `{}`",
                            carrier.name(a),
                            carrier.name(b),
                            carrier.name(c)
                        )));
                    }
                }
            }
        }
        Ok(Preorder { carrier, rel })
    }

    pub fn equality(carrier: Arc<SortedOrderedSet>) -> Self {
        Self::generated_by(carrier, []).expect("equality is a preorder")
    }

    /// The carrier's own order.
    pub fn carrier_order(carrier: Arc<SortedOrderedSet>) -> Self {
        let n = carrier.len();
        let rel = (0..n * n).map(|i| carrier.leq(i / n, i % n)).collect();
        Preorder { carrier, rel }
    }

    /// Relates every pair of elements of equal sort.
    pub fn total(carrier: Arc<SortedOrderedSet>) -> Self {
        let n = carrier.len();
        let rel = (0..n * n)
            .map(|i| carrier.sort_of(i / n) == carrier.sort_of(i % n))
            .collect();
        Preorder { carrier, rel }
    }

    pub fn carrier(&self) -> &Arc<SortedOrderedSet> {
        &self.carrier
    }

    pub fn holds(&self, a: Elem, b: Elem) -> bool {
        self.rel[a * self.carrier.len() + b]
    }

    pub fn equivalent(&self, a: Elem, b: Elem) -> bool {
        self.holds(a, b) && self.holds(b, a)
    }

    pub fn is_order_extending(&self) -> bool {
        let c = &self.carrier;
        c.elements()
            .all(|a| c.elements().all(|b| !c.leq(a, b) || self.holds(a, b)))
    }

    pub fn is_subset_of(&self, other: &Preorder) -> bool {
        self.rel.len() == other.rel.len() && self.rel.iter().zip(&other.rel).all(|(&x, &y)| !x || y)
    }

    /// First pair in `self` but not in `other`.
    pub fn first_pair_outside(&self, other: &Preorder) -> Option<(Elem, Elem)> {
        let n = self.carrier.len();
        (0..n * n)
            .find(|&i| self.rel[i] && !other.rel[i])
            .map(|i| (i / n, i % n))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        let n = self.carrier.len();
        (0..n * n).filter(|&i| self.rel[i]).map(move |i| (i / n, i % n))
    }

    pub fn table(&self) -> &[bool] {
        &self.rel
    }
}

/// `{(a, a') : f(a) <= f(a')}`.
pub fn kernel(f: &SortedFunction) -> Preorder {
    let d = f.domain();
    let n = d.len();
    let rel = (0..n * n)
        .map(|i| {
            let (a, b) = (i / n, i % n);
            d.sort_of(a) == d.sort_of(b) && f.codomain().leq(f.apply(a), f.apply(b))
        })
        .collect();
    Preorder {
        carrier: d.clone(),
        rel,
    }
}

/// The unique `h` with `g = h ∘ f`, for surjective `f`.
pub fn factor_through(f: &SortedFunction, g: &SortedFunction) -> Result<SortedFunction> {
    if f.domain().as_ref() != g.domain().as_ref() {
        return Err(Error::Invalid("factor_through: maps have different domains".into()));
    }
    if let Some(b) = f.missing_image() {
        return Err(Error::NotSurjective(f.codomain().name(b).to_owned()));
    }
    let d = f.domain();
    for a in d.elements() {
        for b in d.elements() {
            if d.sort_of(a) == d.sort_of(b)
                && f.codomain().leq(f.apply(a), f.apply(b))
                && !g.codomain().leq(g.apply(a), g.apply(b))
            {
                return Err(Error::NoFactorisation {
                    left: d.name(a).to_owned(),
                    right: d.name(b).to_owned(),
                });
            }
        }
    }
    let mut h = vec![usize::MAX; f.codomain().len()];
    for a in d.elements() {
        let slot = &mut h[f.apply(a)];
        if *slot == usize::MAX {
            *slot = g.apply(a);
        }
    }
    SortedFunction::new(f.codomain().clone(), g.codomain().clone(), h)
}

/// Quotient of a carrier by an order-extending preorder: the classes ordered
/// by `[a] <= [b]` iff `a ⊑ b`, together with the quotient map. Classes are
/// named after their least element and listed in order of that element.
pub fn quotient_set(
    set: &Arc<SortedOrderedSet>,
    q: &Preorder,
) -> Result<(Arc<SortedOrderedSet>, SortedFunction)> {
    if q.carrier().as_ref() != set.as_ref() {
        return Err(Error::Invalid("preorder lives on a different carrier".into()));
    }
    if !q.is_order_extending() {
        return Err(Error::Invalid("preorder does not contain the carrier order".into()));
    }
    let mut class_of = vec![usize::MAX; set.len()];
    let mut reps = Vec::new();
    for a in set.elements() {
        if class_of[a] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(a);
        for b in a..set.len() {
            if q.equivalent(a, b) {
                class_of[b] = c;
            }
        }
    }
    let mut builder = SortedOrderedSet::builder(set.sorts().iter().copied()).cap(usize::MAX);
    for &r in &reps {
        builder.element(set.name(r), set.sort_of(r));
    }
    for (i, &r) in reps.iter().enumerate() {
        for (j, &s) in reps.iter().enumerate() {
            if i != j && q.holds(r, s) {
                builder.leq(i, j);
            }
        }
    }
    let classes = Arc::new(builder.build()?);
    let map = SortedFunction::new(set.clone(), classes.clone(), class_of)?;
    Ok((classes, map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> Arc<SortedOrderedSet> {
        Arc::new(SortedOrderedSet::chain(Sort::FINITE, ["0", "1"]).unwrap())
    }

    fn discrete(names: &[&str]) -> Arc<SortedOrderedSet> {
        Arc::new(SortedOrderedSet::discrete(Sort::FINITE, names.iter().copied()).unwrap())
    }

    #[test]
    fn antisymmetry_is_validated() {
        let mut b = SortedOrderedSet::builder([Sort::FINITE]);
        let x = b.element("x", Sort::FINITE);
        let y = b.element("y", Sort::FINITE);
        b.leq(x, y).leq(y, x);
        assert_eq!(
            b.build(),
            Err(Error::NotAntisymmetric("x".into(), "y".into()))
        );
    }

    #[test]
    fn cap_is_enforced_and_empty_sorts_allowed() {
        let mut b = SortedOrderedSet::builder([Sort(0), Sort(1), Sort(2)]).cap(2);
        b.element("a", Sort(1));
        b.element("b", Sort(1));
        let set = b.clone().build().unwrap();
        assert!(set.elements_of(Sort(0)).is_empty());
        b.element("c", Sort(1));
        assert!(matches!(b.build(), Err(Error::CarrierTooLarge { .. })));
    }

    #[test]
    fn kernel_of_identity_on_chain_is_the_chain_order() {
        let c = chain2();
        let k = kernel(&SortedFunction::identity(c.clone()));
        assert_eq!(k, Preorder::carrier_order(c));
    }

    #[test]
    fn kernel_of_constant_map_is_total() {
        let d = discrete(&["x", "y", "z"]);
        let f = SortedFunction::new(d.clone(), chain2(), vec![0, 0, 0]).unwrap();
        assert_eq!(kernel(&f), Preorder::total(d));
    }

    #[test]
    fn kernel_enumerates_pairs_against_f() {
        let d = discrete(&["a", "b"]);
        let f = SortedFunction::new(d.clone(), chain2(), vec![1, 0]).unwrap();
        let k = kernel(&f);
        // oracle: (x, y) in ker f iff f(x) <= f(y) in the chain
        let image = [1usize, 0];
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(k.holds(x, y), image[x] <= image[y]);
            }
        }
        let pairs: Vec<_> = k.pairs().collect();
        assert_eq!(pairs, vec![(0, 0), (1, 0), (1, 1)]);
        assert!(k.is_order_extending());
    }

    #[test]
    fn non_monotone_maps_are_rejected() {
        let c = chain2();
        assert_eq!(
            SortedFunction::new(c.clone(), c, vec![1, 0]),
            Err(Error::NotMonotone("0".into(), "1".into()))
        );
    }

    #[test]
    fn factor_through_identity_returns_g() {
        let d = discrete(&["x", "y"]);
        let g = SortedFunction::new(d.clone(), chain2(), vec![1, 0]).unwrap();
        let h = factor_through(&SortedFunction::identity(d), &g).unwrap();
        assert_eq!(h.table(), g.table());
    }

    #[test]
    fn factor_through_forced_values() {
        let d = discrete(&["x", "y", "z"]);
        let pq = discrete(&["p", "q"]);
        let f = SortedFunction::new(d.clone(), pq, vec![0, 0, 1]).unwrap();
        let g = SortedFunction::new(d, discrete(&["0", "1"]), vec![0, 0, 1]).unwrap();
        let h = factor_through(&f, &g).unwrap();
        assert_eq!(h.table(), &[0, 1]);
    }

    #[test]
    fn factor_through_reports_kernel_violation() {
        let d = discrete(&["x", "y"]);
        let f = SortedFunction::new(d.clone(), discrete(&["p"]), vec![0, 0]).unwrap();
        // g(x) = 1, g(y) = 0 in the chain: g(y) <= g(x) but not g(x) <= g(y)
        let g = SortedFunction::new(d, chain2(), vec![1, 0]).unwrap();
        assert_eq!(
            factor_through(&f, &g),
            Err(Error::NoFactorisation {
                left: "x".into(),
                right: "y".into()
            })
        );
    }

    #[test]
    fn quotient_by_own_order_is_isomorphic() {
        let c = chain2();
        let (classes, q) = quotient_set(&c, &Preorder::carrier_order(c.clone())).unwrap();
        assert_eq!(classes.len(), 2);
        assert!(classes.leq(0, 1) && !classes.leq(1, 0));
        assert_eq!(kernel(&q), Preorder::carrier_order(c));
    }

    #[test]
    fn quotient_by_total_preorder_has_one_class_per_inhabited_sort() {
        let mut b = SortedOrderedSet::builder([Sort(0), Sort(1), Sort(2)]);
        b.element("a", Sort(0));
        b.element("b", Sort(0));
        b.element("c", Sort(2));
        let set = Arc::new(b.build().unwrap());
        let (classes, _) = quotient_set(&set, &Preorder::total(set.clone())).unwrap();
        assert_eq!(classes.elements_of(Sort(0)).len(), 1);
        assert_eq!(classes.elements_of(Sort(1)).len(), 0);
        assert_eq!(classes.elements_of(Sort(2)).len(), 1);
    }

    #[test]
    fn quotient_identifying_two_of_three() {
        let d = discrete(&["a", "b", "c"]);
        let q = Preorder::generated_by(d.clone(), [(0, 1), (1, 0)]).unwrap();
        let (classes, map) = quotient_set(&d, &q).unwrap();
        assert_eq!(classes.len(), 2);
        assert!(classes.is_discrete());
        assert_eq!(map.table(), &[0, 0, 1]);
        assert_eq!(kernel(&map), q);
    }

    #[test]
    fn upward_closure_cases() {
        let d = discrete(&["a", "b"]);
        let x: ElemSet = [1].into();
        assert_eq!(upward_closure(&d, &x), x);
        let c = SortedOrderedSet::chain(Sort::FINITE, ["0", "1", "2"]).unwrap();
        assert_eq!(upward_closure(&c, &[1].into()), [1, 2].into());
        assert!(upward_closure(&c, &ElemSet::new()).is_empty());
    }

    #[test]
    fn strip_order_cases() {
        let c = chain2();
        let s = strip_order(&c);
        assert!(s.is_discrete());
        assert_eq!(s.len(), 2);
        assert_eq!(strip_order(&s), s);
        let d = discrete(&["x"]);
        assert_eq!(strip_order(&d), *d);
    }
}
