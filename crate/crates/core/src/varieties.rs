//! Pseudo-variety operations: division, canonical covers, bounded membership
//! in generated pseudo-varieties, and the variety-of-languages closure check.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::algebra::{close, product, subalgebra_generated, Alphabet, FinAlgebra, Morphism, Recognizer};
use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::logic::aperiodicity_counterexample;
use crate::order::{factor_through, upward_closure, Elem, ElemSet, Sort, SortedFunction};
use crate::profinite::{library, satisfies_all, Inequality};
use crate::syntactic::{syntactic_algebra, SyntacticResult};

/// Default number of generator tuples tried by [`divides`].
pub const SEARCH_CAP: usize = 1 << 20;

/// `A` as the image of a subalgebra of `B`. When `B` is a product of
/// generators, `factors` lists them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividesWitness {
    pub factors: Vec<usize>,
    /// Elements of `B` mapped to the chosen generators of `A`.
    pub generators: Vec<(Elem, Elem)>,
    /// The subalgebra of `B`, with the image of each element in `A`.
    pub subalgebra: Vec<Elem>,
    pub surjection: Vec<Elem>,
}

impl DividesWitness {
    /// Re-checks that `subalgebra` is closed in `b` and that `surjection` is
    /// a surjective morphism onto `a`.
    pub fn verify(&self, a: &Arc<FinAlgebra>, b: &Arc<FinAlgebra>) -> Result<()> {
        let gens: ElemSet = self.subalgebra.iter().copied().collect();
        let (sub, inclusion) = subalgebra_generated(b, &gens)?;
        let elems: Vec<Elem> = sub.carrier().elements().map(|e| inclusion.apply(e)).collect();
        if elems.iter().collect::<BTreeSet<_>>() != self.subalgebra.iter().collect() {
            return Err(Error::Invalid("witness subalgebra is not closed".into()));
        }
        let map = elems
            .iter()
            .map(|e| {
                let i = self.subalgebra.iter().position(|x| x == e).expect("same set");
                self.surjection[i]
            })
            .collect();
        let mu = Morphism::new(sub, a.clone(), map)?;
        if !mu.is_surjective() {
            return Err(Error::NotSurjective("witness map misses an element".into()));
        }
        Ok(())
    }
}

/// A small generating set: elements are added in carrier order while they
/// are not yet generated.
pub fn generating_set(alg: &Arc<FinAlgebra>) -> Result<Vec<Elem>> {
    let mut gens: ElemSet = ElemSet::new();
    let mut covered: ElemSet = ElemSet::new();
    for e in alg.carrier().elements() {
        if covered.contains(&e) {
            continue;
        }
        gens.insert(e);
        let (_, inc) = subalgebra_generated(alg, &gens)?;
        covered = inc.map().table().iter().copied().collect();
    }
    Ok(gens.into_iter().collect())
}

/// Whether `a` is a quotient of a subalgebra of `b`. Tries every assignment
/// of the generators of `a` to same-sort elements of `b` and closes the
/// assignment as a relation; it is a witness when the relation is a monotone
/// function. More than `cap` assignments is `BoundExceeded`.
pub fn divides(a: &Arc<FinAlgebra>, b: &Arc<FinAlgebra>, cap: usize) -> Result<Option<DividesWitness>> {
    if a.kind() != b.kind() {
        return Err(Error::SortMismatch(format!("algebras of different kinds ({} and {})", a.kind(), b.kind())));
    }
    if a.sorts().iter().any(|&s| !b.sorts().contains(&s)) {
        return Ok(None);
    }
    let gens = generating_set(a)?;
    let choices: Vec<&[Elem]> = gens.iter().map(|&g| b.elements_of(a.sort_of(g))).collect();
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let total = choices.iter().try_fold(1usize, |n, c| n.checked_mul(c.len()));
    match total {
        Some(n) if n <= cap => {}
        _ => {
            return Err(Error::BoundExceeded(format!(
                "{} generator assignments (cap {cap})",
                choices.iter().map(|c| c.len().to_string()).collect::<Vec<_>>().join("·")
            )))
        }
    }
    let mut pick = vec![0; gens.len()];
    loop {
        let assignment: Vec<(Elem, Elem)> = pick.iter().zip(&choices).zip(&gens).map(|((&i, c), &g)| (c[i], g)).collect();
        if let Some(w) = try_assignment(a, b, &assignment)? {
            return Ok(Some(w));
        }
        // odometer, last generator fastest
        let mut i = gens.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

fn try_assignment(a: &FinAlgebra, b: &FinAlgebra, assignment: &[(Elem, Elem)]) -> Result<Option<DividesWitness>> {
    let mut image: HashMap<Elem, Elem> = HashMap::new();
    for &(x, g) in assignment {
        if *image.entry(x).or_insert(g) != g {
            return Ok(None);
        }
    }
    let closure = close(
        b.kind(),
        b.sorts(),
        assignment.iter().map(|&(x, g)| ((x, g), b.sort_of(x))).collect(),
        |sym, args| {
            let xs: Vec<Elem> = args.iter().map(|k| k.0).collect();
            let gs: Vec<Elem> = args.iter().map(|k| k.1).collect();
            let pair = (b.apply_symbol(sym, &xs)?, a.apply_symbol(sym, &gs)?);
            if *image.entry(pair.0).or_insert(pair.1) != pair.1 {
                return Err(Error::Invalid("relation is not functional".into()));
            }
            Ok(pair)
        },
        |p, q| b.carrier().leq(p.0, q.0) && a.carrier().leq(p.1, q.1),
        |_, i| i.to_string(),
        usize::MAX,
    );
    let closure = match closure {
        Ok(c) => c,
        Err(Error::Invalid(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    for p in &closure.keys {
        for q in &closure.keys {
            if b.carrier().leq(p.0, q.0) && !a.carrier().leq(p.1, q.1) {
                return Ok(None);
            }
        }
    }
    Ok(Some(DividesWitness {
        factors: Vec::new(),
        generators: assignment.to_vec(),
        subalgebra: closure.keys.iter().map(|k| k.0).collect(),
        surjection: closure.keys.iter().map(|k| k.1).collect(),
    }))
}

/// The cover `B ↠ A` built from the syntactic algebras of the languages
/// `K_a = π⁻¹(↑a)` over the alphabet `A|_Δ`.
#[derive(Clone, Debug)]
pub struct CanonicalCover {
    pub cover: Arc<FinAlgebra>,
    pub mu: Morphism,
    /// `a` and `Syn(K_a)`, one per element of `A|_Δ`.
    pub languages: Vec<(Elem, SyntacticResult)>,
    /// Components of each element of the cover.
    pub tuples: Vec<Vec<Elem>>,
}

pub fn canonical_cover(a: &Arc<FinAlgebra>, delta: &[Sort]) -> Result<CanonicalCover> {
    let letters: Vec<Elem> = a.carrier().elements().filter(|&e| delta.contains(&a.sort_of(e))).collect();
    let (sub, _) = subalgebra_generated(a, &letters.iter().copied().collect())?;
    if sub.len() != a.len() {
        return Err(Error::Invalid("the elements of the chosen sorts do not generate the algebra".into()));
    }
    let sigma = Alphabet::new(letters.iter().map(|&e| (a.name(e).to_owned(), a.sort_of(e))))?;
    let mut languages = Vec::new();
    for &x in &letters {
        let up = upward_closure(a.carrier(), &[x].into());
        let rec = Recognizer::new(sigma.clone(), a.clone(), letters.clone(), up, a.sort_of(x))?;
        languages.push((x, syntactic_algebra(&rec)?));
    }
    let syns: Vec<&Arc<FinAlgebra>> = languages.iter().map(|(_, s)| &s.algebra).collect();
    let tuple_op = |sym: &crate::algebra::Symbol, args: &[&Vec<Elem>]| -> Result<Vec<Elem>> {
        syns.iter()
            .enumerate()
            .map(|(i, s)| s.apply_symbol(sym, &args.iter().map(|t| t[i]).collect::<Vec<_>>()))
            .collect()
    };
    let tuple_leq = |s: &Vec<Elem>, t: &Vec<Elem>| syns.iter().enumerate().all(|(i, alg)| alg.carrier().leq(s[i], t[i]));
    let tuple_of = |l: usize| -> Vec<Elem> { languages.iter().map(|(_, s)| s.beta[l]).collect() };
    let show = |t: &Vec<Elem>| {
        let parts: Vec<&str> = t.iter().zip(&syns).map(|(&e, s)| s.name(e)).collect();
        format!("({})", parts.join(","))
    };

    let cover = close(
        a.kind(),
        a.sorts(),
        (0..letters.len()).map(|l| (tuple_of(l), sigma.sort(l))).collect(),
        |sym, args| tuple_op(sym, args),
        tuple_leq,
        |t, _| show(t),
        usize::MAX,
    )?;
    let pairs = close(
        a.kind(),
        a.sorts(),
        (0..letters.len()).map(|l| ((tuple_of(l), letters[l]), sigma.sort(l))).collect(),
        |sym, args| {
            let ts: Vec<&Vec<Elem>> = args.iter().map(|k| &k.0).collect();
            let xs: Vec<Elem> = args.iter().map(|k| k.1).collect();
            Ok((tuple_op(sym, &ts)?, a.apply_symbol(sym, &xs)?))
        },
        |p, q| tuple_leq(&p.0, &q.0) && a.carrier().leq(p.1, q.1),
        |_, i| i.to_string(),
        usize::MAX,
    )?;
    let cover_alg = Arc::new(cover.algebra);
    let index: HashMap<&Vec<Elem>, Elem> = cover.keys.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let q = SortedFunction::new(
        pairs.algebra.carrier().clone(),
        cover_alg.carrier().clone(),
        pairs.keys.iter().map(|k| index[&k.0]).collect(),
    )?;
    let pi = SortedFunction::new(
        pairs.algebra.carrier().clone(),
        a.carrier().clone(),
        pairs.keys.iter().map(|k| k.1).collect(),
    )?;
    let mu = factor_through(&q, &pi)?;
    let mu = Morphism::new(cover_alg.clone(), a.clone(), mu.table().to_vec())?;
    if !mu.is_surjective() {
        return Err(Error::NotSurjective("canonical cover map".into()));
    }
    for (l, &x) in letters.iter().enumerate() {
        if mu.apply(cover.generators[l]) != x {
            return Err(Error::Disagreement(format!("μ∘q differs from π on `{}`", a.name(x))));
        }
    }
    Ok(CanonicalCover {
        cover: cover_alg,
        mu,
        languages,
        tuples: cover.keys,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MembershipBounds {
    /// Most factors in a product.
    pub max_arity: usize,
    /// Most uses of one generator in a product.
    pub max_reuse: usize,
    /// Cap on generator assignments per division search.
    pub search_cap: usize,
    /// Largest product carrier tried.
    pub max_product: usize,
}

impl Default for MembershipBounds {
    fn default() -> Self {
        MembershipBounds {
            max_arity: 3,
            max_reuse: 3,
            search_cap: SEARCH_CAP,
            max_product: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    In(DividesWitness),
    /// An inequality holding in every generator but failing in `A`.
    NotIn(Inequality),
    Unknown,
}

/// Inequalities used to refute membership.
fn separating_candidates() -> Vec<Inequality> {
    let mut out = Vec::new();
    for name in ["aperiodic", "commutative", "idempotent"] {
        out.extend(library(name).expect("library set"));
    }
    for p in 2..=6 {
        let xs = vec!["x"; p].join(" ");
        out.extend(Inequality::parse(&format!("x^w {xs} = x^w")).expect("well-formed"));
    }
    out
}

/// Bounded search for `A` in the pseudo-variety generated by `gens`:
/// products of generators are tried in order of arity, then by multiset of
/// factors.
pub fn generated_membership(a: &Arc<FinAlgebra>, gens: &[Arc<FinAlgebra>], bounds: MembershipBounds) -> Result<Membership> {
    for g in gens {
        if g.kind() != a.kind() {
            return Err(Error::SortMismatch("generators of a different kind".into()));
        }
    }
    for ineq in separating_candidates() {
        if satisfies_all(a, std::slice::from_ref(&ineq))?.is_none() {
            continue;
        }
        let mut everywhere = true;
        for g in gens {
            if satisfies_all(g, std::slice::from_ref(&ineq))?.is_some() {
                everywhere = false;
                break;
            }
        }
        if everywhere && !gens.is_empty() {
            return Ok(Membership::NotIn(ineq));
        }
    }
    for arity in 1..=bounds.max_arity {
        for factors in multisets(gens.len(), arity, bounds.max_reuse) {
            let size = factors.iter().try_fold(1usize, |n, &i| n.checked_mul(gens[i].len()));
            if size.is_none_or(|s| s > bounds.max_product) {
                continue;
            }
            let parts: Vec<Arc<FinAlgebra>> = factors.iter().map(|&i| gens[i].clone()).collect();
            let b = match product(a.kind(), &parts) {
                Ok(p) => p.algebra,
                Err(Error::SortMismatch(_)) => continue,
                Err(e) => return Err(e),
            };
            match divides(a, &b, bounds.search_cap) {
                Ok(Some(mut w)) => {
                    w.factors = factors;
                    return Ok(Membership::In(w));
                }
                Ok(None) | Err(Error::BoundExceeded(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Membership::Unknown)
}

/// Nondecreasing index sequences of length `k` over `0..n` with no index
/// used more than `reuse` times.
fn multisets(n: usize, k: usize, reuse: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, reuse: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            if cur.iter().filter(|&&j| j == i).count() < reuse {
                cur.push(i);
                go(n, k, reuse, i, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, reuse, 0, &mut Vec::new(), &mut out);
    out
}

/// One language built from the corpus by a variety operation, and whether
/// its syntactic algebra satisfies the aperiodicity identities.
#[derive(Clone, Debug)]
pub struct ClosureInstance {
    pub description: String,
    pub language: Dfa,
    pub aperiodic: bool,
}

pub fn is_aperiodic(dfa: &Dfa) -> Result<bool> {
    let syn = syntactic_algebra(&dfa.minimize().to_recognizer()?)?;
    Ok(aperiodicity_counterexample(&syn)?.is_none())
}

/// Builds unions, intersections, inverse images and derivatives of the
/// aperiodic members of `corpus` (all over `sigma`) and re-decides each.
/// `morphisms` are letter-to-word maps `Σ → Σ⁺`.
pub fn variety_closure_instances(
    corpus: &[(String, Dfa)],
    sigma: &Alphabet,
    morphisms: &[Vec<Vec<usize>>],
    quotient_words: &[Vec<usize>],
) -> Result<Vec<ClosureInstance>> {
    let mut members = Vec::new();
    for (name, d) in corpus {
        if d.alphabet() != sigma {
            return Err(Error::Invalid(format!("`{name}` is over a different alphabet")));
        }
        if is_aperiodic(d)? {
            members.push((name.as_str(), d));
        }
    }
    let mut out = Vec::new();
    let mut push = |description: String, language: Dfa| -> Result<()> {
        let aperiodic = is_aperiodic(&language)?;
        out.push(ClosureInstance {
            description,
            language,
            aperiodic,
        });
        Ok(())
    };
    for (i, (n, d)) in members.iter().enumerate() {
        for (m, e) in &members[i..] {
            push(format!("{n} ∪ {m}"), d.union(e)?)?;
            push(format!("{n} ∩ {m}"), d.intersect(e)?)?;
        }
        for h in morphisms {
            let shown: Vec<String> = h.iter().map(|w| crate::automata::show_word(sigma, w)).collect();
            push(format!("h⁻¹({n}), h = [{}]", shown.join(", ")), d.inverse_image(sigma.clone(), h)?)?;
        }
        for u in quotient_words {
            for v in quotient_words {
                let (su, sv) = (crate::automata::show_word(sigma, u), crate::automata::show_word(sigma, v));
                push(format!("({su})⁻¹ {n} ({sv})⁻¹"), d.derivative(u, v))?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::cyclic;
    use crate::monad::MonadKind;
    use crate::order::SortedOrderedSet;

    fn syn_aa() -> Arc<FinAlgebra> {
        let rec = Dfa::from_regex("(a|b)*aa(a|b)*").unwrap().to_recognizer().unwrap();
        syntactic_algebra(&rec).unwrap().algebra
    }

    fn trivial() -> Arc<FinAlgebra> {
        Arc::new(
            FinAlgebra::new(MonadKind::Word, Arc::new(SortedOrderedSet::discrete(Sort::FINITE, ["1"]).unwrap()), |_, _| 0)
                .unwrap(),
        )
    }

    #[test]
    fn division_examples() {
        let s = syn_aa();
        let z2 = Arc::new(cyclic(2));
        let z3 = Arc::new(cyclic(3));
        let w = divides(&s, &s, SEARCH_CAP).unwrap().unwrap();
        w.verify(&s, &s).unwrap();
        for b in [&s, &z2, &z3] {
            let w = divides(&trivial(), b, SEARCH_CAP).unwrap().unwrap();
            w.verify(&trivial(), b).unwrap();
        }
        assert_eq!(divides(&z2, &s, SEARCH_CAP).unwrap(), None);
        assert_eq!(divides(&z2, &z3, SEARCH_CAP).unwrap(), None);
        assert!(divides(&z2, &Arc::new(cyclic(4)), SEARCH_CAP).unwrap().is_some());
        assert!(matches!(divides(&s, &s, 3), Err(Error::BoundExceeded(_))));
    }

    #[test]
    fn covers() {
        for a in [trivial(), Arc::new(cyclic(2)), syn_aa()] {
            let c = canonical_cover(&a, &[Sort::FINITE]).unwrap();
            assert!(c.mu.is_surjective());
            assert_eq!(c.languages.len(), a.len());
            let syns: Vec<Arc<FinAlgebra>> = c.languages.iter().map(|(_, s)| s.algebra.clone()).collect();
            let prod = product(MonadKind::Word, &syns).unwrap();
            assert!(divides(&c.cover, &prod.algebra, SEARCH_CAP).unwrap().is_some());
        }
        assert_eq!(canonical_cover(&trivial(), &[Sort::FINITE]).unwrap().cover.len(), 1);
    }

    #[test]
    fn membership_examples() {
        let z2 = Arc::new(cyclic(2));
        let z3 = Arc::new(cyclic(3));
        let b = MembershipBounds::default();
        assert!(matches!(generated_membership(&z2, std::slice::from_ref(&z2), b).unwrap(), Membership::In(_)));
        assert!(matches!(generated_membership(&trivial(), std::slice::from_ref(&z3), b).unwrap(), Membership::In(_)));
        assert!(!matches!(generated_membership(&z3, std::slice::from_ref(&z2), b).unwrap(), Membership::In(_)));
        assert!(matches!(generated_membership(&z2, &[syn_aa()], b).unwrap(), Membership::NotIn(_)));
    }

    #[test]
    fn multiset_enumeration() {
        assert_eq!(multisets(2, 2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(multisets(2, 3, 1), Vec::<Vec<usize>>::new());
        assert_eq!(multisets(3, 1, 1).len(), 3);
    }
}
