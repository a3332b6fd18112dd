//! The invariant suite behind `emalg laws`. Every check is deterministic
//! given a seed and reports how many instances it examined.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    check_algebra_laws, is_congruence_ordering, morphism_violation, product, quotient_algebra, semigroups,
    subalgebra_generated, Alphabet, FinAlgebra,
};
use crate::automata::Dfa;
use crate::corpus;
use crate::error::{Error, Result};
use crate::logic::{fo_definable, theory_algebra};
use crate::monad::{check_monad_laws, MonadKind};
use crate::order::{kernel, quotient_set, upward_closure, Elem, ElemSet, Preorder, Sort};
use crate::profinite::{library, satisfies_all};
use crate::syntactic::{
    decompose_as_derivatives, eval_upword, factor_to_syntactic, syntactic_algebra, syntactic_preorder, upword,
};
use crate::varieties::{canonical_cover, divides, variety_closure_instances, SEARCH_CAP};
use crate::FreeElement;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Instances examined.
    pub checked: usize,
    /// First failure, or a short summary when the check passed.
    pub detail: String,
}

/// Random samples per monad instance for the law check.
pub const MONAD_SAMPLES: usize = 10_000;
/// Random preorders for the congruence check.
pub const PREORDERS: usize = 500;
/// Random recognizers for the terminality check.
pub const RECOGNIZERS: usize = 100;
/// Random target sets for the decomposition check.
pub const TARGETS: usize = 20;
/// Random `(u, v)` pairs per algebra for the Wilke check.
pub const UPWORD_PAIRS: usize = 1000;

/// Least witnessing rank of each corpus language over its alphabet.
pub const CORPUS_RANKS: &[(&str, Option<usize>)] = &[
    ("contains-aa", Some(2)),
    ("ends-ab", Some(2)),
    ("b-then-a", Some(2)),
    ("all", Some(0)),
    ("starts-a", Some(2)),
    ("some-a", Some(1)),
    ("only-a", Some(1)),
    ("alternating", Some(2)),
    ("even-length", None),
    ("even-a", None),
    ("even-unary", None),
    ("triple-unary", None),
];

#[derive(Default)]
struct Tally {
    checked: usize,
    failure: Option<String>,
    summary: String,
}

impl Tally {
    fn fail(&mut self, msg: impl Into<String>) {
        if self.failure.is_none() {
            self.failure = Some(msg.into());
        }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<Tally>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("monad-laws", monad_laws),
    ("algebra-laws", algebra_laws),
    ("congruences", congruences),
    ("terminality", terminality),
    ("syntactic-constants", syntactic_constants),
    ("decomposition", decomposition),
    ("dual-deciders", dual_deciders),
    ("theory-algebra", theory_constants),
    ("wilke-invariance", wilke_invariance),
    ("canonical-cover", covers),
    ("mod-closure", mod_closure),
    ("division", division),
    ("variety-harness", variety_harness),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs one named check; `None` for an unknown name.
pub fn run(name: &str, seed: u64) -> Option<Check> {
    let &(name, f) = CHECKS.iter().find(|c| c.0 == name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ name_hash(name));
    Some(match f(&mut rng) {
        Ok(t) => Check {
            name,
            passed: t.failure.is_none(),
            checked: t.checked,
            detail: t.failure.unwrap_or(t.summary),
        },
        Err(e) => Check {
            name,
            passed: false,
            checked: 0,
            detail: e.to_string(),
        },
    })
}

pub fn run_all(seed: u64) -> Vec<Check> {
    CHECKS.iter().filter_map(|c| run(c.0, seed)).collect()
}

fn name_hash(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Nonempty words over `k` letters up to `max_len`, shortlex.
pub fn words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..k).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn ab() -> Alphabet {
    Alphabet::letters(["a", "b"]).expect("two letters")
}

fn monad_laws(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    for kind in [MonadKind::Word, MonadKind::OmegaUp, MonadKind::Tree { max_arity: 3 }] {
        let r = check_monad_laws(kind, MONAD_SAMPLES, 4, rng);
        t.checked += r.checked;
        if let Some(v) = r.violations.first() {
            t.fail(format!("{kind}: {v}"));
        }
    }
    t.summary = format!("{} samples per instance", MONAD_SAMPLES);
    Ok(t)
}

fn algebra_laws(_: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    for (name, alg) in corpus::algebras() {
        let r = check_algebra_laws(&alg);
        t.expect(r.is_ok(), || format!("{name}: {}", r.violations.join("; ")));
    }
    t.summary = format!("{} shipped algebras", t.checked);
    Ok(t)
}

/// Small ordered semigroups: all semigroups up to order 3, some of order 4,
/// and syntactic algebras of random automata with at most five elements.
fn small_algebras(rng: &mut ChaCha8Rng) -> Result<Vec<Arc<FinAlgebra>>> {
    let mut pool: Vec<Arc<FinAlgebra>> = Vec::new();
    for n in 1..=3 {
        pool.extend(semigroups(n)?.into_iter().map(Arc::new));
    }
    let four = semigroups(4)?;
    pool.extend(four.choose_multiple(rng, 20).cloned().map(Arc::new));
    let mut syntactic = 0;
    while syntactic < 30 {
        let dfa = Dfa::random(ab(), rng.gen_range(2..=3), rng)?;
        let syn = syntactic_algebra(&dfa.to_recognizer()?)?;
        if (2..=5).contains(&syn.algebra.len()) {
            pool.push(syn.algebra);
            syntactic += 1;
        }
    }
    Ok(pool)
}

fn random_upset(alg: &FinAlgebra, rng: &mut impl Rng) -> ElemSet {
    let picked: ElemSet = alg.elements_of(Sort::FINITE).iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    upward_closure(alg.carrier(), &picked)
}

/// `π(s) ⊑ π(t)` for all words `s, t` of equal length up to `max_len` that
/// are related letter by letter.
fn compatible_on_words(alg: &FinAlgebra, q: &Preorder, max_len: usize) -> Result<bool> {
    let n = alg.len();
    for len in 1..=max_len {
        for code in 0..n.pow(len as u32) {
            let s: Vec<Elem> = (0..len).map(|i| code / n.pow(i as u32) % n).collect();
            let ups: Vec<Vec<Elem>> = s.iter().map(|&a| (0..n).filter(|&b| q.holds(a, b)).collect()).collect();
            let fs = alg.fold(&s)?;
            let mut idx = vec![0; len];
            loop {
                let t: Vec<Elem> = idx.iter().zip(&ups).map(|(&i, u)| u[i]).collect();
                if !q.holds(fs, alg.fold(&t)?) {
                    return Ok(false);
                }
                let Some(pos) = (0..len).find(|&p| idx[p] + 1 < ups[p].len()) else {
                    break;
                };
                idx[pos] += 1;
                idx[..pos].iter_mut().for_each(|i| *i = 0);
            }
        }
    }
    Ok(true)
}

/// The quotient table read off representatives is an algebra, the quotient
/// map is a morphism into it, and its kernel is `q`.
fn is_kernel_of_quotient(alg: &FinAlgebra, q: &Preorder) -> Result<bool> {
    if !q.is_order_extending() {
        return Ok(false);
    }
    let (classes, map) = quotient_set(alg.carrier(), q)?;
    let mut rep = vec![usize::MAX; classes.len()];
    for a in alg.carrier().elements().rev() {
        rep[map.apply(a)] = a;
    }
    let candidate = FinAlgebra::from_fn(alg.kind(), classes, |sym, args| {
        let a: Vec<Elem> = args.iter().map(|&c| rep[c]).collect();
        map.apply(alg.apply_symbol(sym, &a).expect("same signature"))
    })?;
    Ok(candidate.validate().is_ok() && morphism_violation(&map, alg, &candidate).is_none() && kernel(&map) == *q)
}

fn congruences(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let pool = small_algebras(rng)?;
    let mut t = Tally::default();
    let mut yes = 0;
    for _ in 0..PREORDERS {
        let alg = pool.choose(rng).expect("nonempty pool");
        let carrier = alg.carrier().clone();
        let q = match rng.gen_range(0..10) {
            0..=5 => {
                let n = alg.len();
                let extra: Vec<(Elem, Elem)> = (0..rng.gen_range(1..=3))
                    .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                    .collect();
                Preorder::generated_by(carrier.clone(), carrier.strict_pairs().into_iter().chain(extra))?
            }
            6..=8 => syntactic_preorder(alg, &random_upset(alg, rng), Sort::FINITE)?,
            _ => Preorder::carrier_order(carrier),
        };
        let v1 = q.is_order_extending() && compatible_on_words(alg, &q, 3)?;
        let v2 = is_kernel_of_quotient(alg, &q)?;
        let v3 = is_congruence_ordering(alg, &q);
        yes += v3 as usize;
        t.expect(v1 == v2 && v2 == v3, || {
            format!("verdicts {v1}/{v2}/{v3} differ on a preorder of `{}`", alg.carrier().format_set(&alg.carrier().elements().collect()))
        });
    }
    if yes == 0 || yes == PREORDERS {
        t.fail("random preorders never split into congruences and non-congruences");
    }
    t.summary = format!("{yes} congruences among {PREORDERS} preorders");
    Ok(t)
}

fn terminality(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    let ws = words(2, 6);
    for _ in 0..RECOGNIZERS {
        let dfa = Dfa::random(ab(), rng.gen_range(1..=4), rng)?;
        let rec = dfa.to_recognizer()?;
        let syn = syntactic_algebra(&rec)?;
        let rho = factor_to_syntactic(&rec, &syn)?;
        let mut ok = true;
        for w in &ws {
            let w = FreeElement::Word(w.clone());
            ok &= rho.apply(rec.eval(&w)?) == syn.syn(&w)?;
        }
        t.expect(ok, || format!("ρ∘φ differs from syn on\n{dfa}"));
    }
    t.summary = format!("{RECOGNIZERS} recognizers, words up to length 6");
    Ok(t)
}

fn syntactic_constants(_: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    let aperiodic = library("aperiodic").expect("library set");
    let aa = syntactic_algebra(&corpus::language("contains-aa").expect("corpus")?.to_recognizer()?)?;
    t.expect(aa.algebra.len() == 5, || format!("Syn(contains-aa) has {} elements", aa.algebra.len()));
    t.expect(satisfies_all(&aa.algebra, &aperiodic)?.is_none(), || "Syn(contains-aa) is not aperiodic".into());
    let even = syntactic_algebra(&corpus::language("even-unary").expect("corpus")?.to_recognizer()?)?;
    t.expect(even.algebra.len() == 2, || format!("Syn((aa)+) has {} elements", even.algebra.len()));
    let class_a = even.syn(&FreeElement::Word(vec![0]))?;
    match satisfies_all(&even.algebra, &aperiodic)? {
        Some((_, beta)) => t.expect(beta.get("x") == Some(&class_a), || format!("witness {beta:?} is not x = [a]")),
        None => t.expect(false, || "Syn((aa)+) satisfies aperiodicity".into()),
    }
    t.summary = "|Syn(contains-aa)| = 5, |Syn((aa)+)| = 2, witness x = [a]".into();
    Ok(t)
}

fn decomposition(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let langs = corpus::languages()?;
    let syns = langs
        .iter()
        .map(|(_, d)| syntactic_algebra(&d.to_recognizer()?))
        .collect::<Result<Vec<_>>>()?;
    let mut targets: Vec<(usize, ElemSet)> = syns.iter().enumerate().map(|(i, s)| (i, s.accepting.clone())).collect();
    for _ in 0..TARGETS {
        let i = rng.gen_range(0..syns.len());
        targets.push((i, random_upset(&syns[i].algebra, rng)));
    }
    let mut t = Tally::default();
    for (i, q) in targets {
        let syn = &syns[i];
        let d = decompose_as_derivatives(syn, &q, &[])?;
        for w in words(syn.alphabet().len(), 6) {
            let w = FreeElement::Word(w);
            let want = q.contains(&syn.syn(&w)?);
            let got = d.contains(&syn.recognizer, &w)?;
            t.expect(want == got, || {
                format!("{}: target {} disagrees on {}", langs[i].0, syn.algebra.carrier().format_set(&q), syn.alphabet().show(&w))
            });
        }
    }
    t.summary = format!("{} corpus targets and {TARGETS} random ones, words up to length 6", langs.len());
    Ok(t)
}

fn dual_deciders(_: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    let mut ranks = Vec::new();
    for (name, dfa) in corpus::languages()? {
        let v = fo_definable(&dfa)?;
        let expected = CORPUS_RANKS.iter().find(|r| r.0 == name).map(|r| r.1);
        t.expect(!v.inconclusive_rank, || format!("{name}: inconclusive rank"));
        t.expect(v.definable == v.rank.is_some(), || format!("{name}: aperiodicity says {}, rank sweep {:?}", v.definable, v.rank));
        t.expect(expected == Some(v.rank), || format!("{name}: least rank {:?}, recorded {expected:?}", v.rank));
        ranks.push(format!("{name}={}", v.rank.map_or("-".into(), |r| r.to_string())));
    }
    t.summary = ranks.join(" ");
    Ok(t)
}

fn theory_constants(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    for (m, size) in [(0, 1), (1, 3)] {
        let th = theory_algebra(&ab(), m)?;
        let n = th.algebra.len();
        t.expect(n == size, || format!("Θ_{m} has {n} classes, expected {size}"));
        for x in 0..n {
            for y in 0..n {
                let uv: Vec<usize> = th.representatives[x].iter().chain(&th.representatives[y]).copied().collect();
                let got = th.algebra.dot(x, y);
                let want = th.class_of(&uv)?;
                t.expect(got == want, || format!("Θ_{m}: table entry ({x}, {y}) is {got}, concatenation gives {want}"));
            }
        }
        if let Some((u, v)) = th.check_compositionality(300, 8, rng)? {
            t.fail(format!("Θ_{m}: type of {u:?}·{v:?} is not the product of types"));
        }
    }
    t.summary = "|Θ_0| = 1, |Θ_1| = 3 over {a, b}".into();
    Ok(t)
}

fn wilke_invariance(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    for name in ["finitely_many_a", "first_letter", "parity_prefix"] {
        let alg = corpus::algebra(name).expect("shipped algebra");
        let labels = alg.elements_of(Sort::FINITE).to_vec();
        for _ in 0..UPWORD_PAIRS {
            let mut draw = |min: usize| -> Vec<Elem> {
                (0..rng.gen_range(min..=5)).map(|_| *labels.choose(rng).expect("sort 1 inhabited")).collect()
            };
            let (u, v) = (draw(0), draw(1));
            let uv: Vec<Elem> = u.iter().chain(&v).copied().collect();
            let vv: Vec<Elem> = v.iter().chain(&v).copied().collect();
            let e = eval_upword(&alg, &u, &v, |&x| x)?;
            let same = e == eval_upword(&alg, &uv, &v, |&x| x)?
                && e == eval_upword(&alg, &u, &vv, |&x| x)?
                && e == alg.eval(&upword(&u, &v), |&x| x)?;
            t.expect(same, || format!("{name}: values differ for u = {u:?}, v = {v:?}"));
        }
    }
    t.summary = format!("3 algebras, {UPWORD_PAIRS} pairs each");
    Ok(t)
}

fn covers(_: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    for (name, alg) in corpus::algebras() {
        let c = canonical_cover(&alg, alg.sorts())?;
        let ok = c.mu.is_surjective() && morphism_violation(c.mu.map(), &c.cover, &alg).is_none();
        t.expect(ok, || format!("{name}: μ is not a surjective morphism"));
    }
    t.summary = format!("{} shipped algebras", t.checked);
    Ok(t)
}

/// Preorders on `0..n`, as relation tables.
fn all_preorders(n: usize) -> Vec<Vec<bool>> {
    let off: Vec<usize> = (0..n * n).filter(|i| i / n != i % n).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << off.len()) {
        let mut rel = vec![false; n * n];
        (0..n).for_each(|a| rel[a * n + a] = true);
        for (bit, &i) in off.iter().enumerate() {
            rel[i] = mask >> bit & 1 == 1;
        }
        let transitive =
            (0..n).all(|a| (0..n).all(|b| !rel[a * n + b] || (0..n).all(|c| !rel[b * n + c] || rel[a * n + c])));
        if transitive {
            out.push(rel);
        }
    }
    out
}

/// Mod(aperiodic) among semigroups of order up to four, checked against
/// quotients by every congruence ordering, binary products, and the
/// subalgebras of those products generated by one or two elements.
fn mod_closure(_: &mut ChaCha8Rng) -> Result<Tally> {
    let ap = library("aperiodic").expect("library set");
    let mut t = Tally::default();
    let mut members: Vec<Arc<FinAlgebra>> = Vec::new();
    let mut total = 0;
    for n in 1..=4 {
        let preorders = all_preorders(n);
        for s in semigroups(n)? {
            total += 1;
            if satisfies_all(&s, &ap)?.is_some() {
                continue;
            }
            let s = Arc::new(s);
            for rel in &preorders {
                let q = Preorder::from_table(s.carrier().clone(), rel.clone())?;
                if !is_congruence_ordering(&s, &q) {
                    continue;
                }
                let (quotient, _) = quotient_algebra(&s, &q)?;
                t.expect(satisfies_all(&quotient, &ap)?.is_none(), || "a quotient of an aperiodic semigroup is not aperiodic".into());
            }
            members.push(s);
        }
    }
    let mut seen: HashSet<BTreeSet<Elem>> = HashSet::new();
    for i in 0..members.len() {
        for j in i..members.len() {
            let p = product(MonadKind::Word, &[members[i].clone(), members[j].clone()])?;
            let alg = &p.algebra;
            t.expect(satisfies_all(alg, &ap)?.is_none(), || "a product of aperiodic semigroups is not aperiodic".into());
            seen.clear();
            let n = alg.len();
            for x in 0..n {
                for y in x..n {
                    let gens: ElemSet = [x, y].into();
                    let (sub, inc) = subalgebra_generated(alg, &gens)?;
                    let image: BTreeSet<Elem> = inc.map().table().iter().copied().collect();
                    if !seen.insert(image) {
                        continue;
                    }
                    t.expect(satisfies_all(&sub, &ap)?.is_none(), || "a subalgebra of a product is not aperiodic".into());
                }
            }
        }
    }
    t.summary = format!("{} aperiodic among {total} semigroups", members.len());
    Ok(t)
}

fn division(_: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::default();
    let z2 = corpus::algebra("z2").expect("shipped");
    let aa = corpus::algebra("contains_aa").expect("shipped");
    let trivial = corpus::algebra("trivial").expect("shipped");
    t.expect(divides(&aa, &aa, SEARCH_CAP)?.is_some(), || "contains_aa does not divide itself".into());
    t.expect(divides(&trivial, &z2, SEARCH_CAP)?.is_some(), || "the trivial algebra does not divide z2".into());
    t.expect(divides(&z2, &aa, SEARCH_CAP)?.is_none(), || "z2 divides an aperiodic algebra".into());
    t.summary = "identity, trivial divisor, no group divisor of contains_aa".into();
    Ok(t)
}

fn variety_harness(_: &mut ChaCha8Rng) -> Result<Tally> {
    let sigma = ab();
    let corpus_langs = ["(a|b)*aa(a|b)*", "(aa)+", "(a|b)*ab", "b*a*"]
        .iter()
        .map(|re| Ok((re.to_string(), Dfa::from_regex_over(re, &sigma)?)))
        .collect::<Result<Vec<_>>>()?;
    let morphisms = vec![vec![vec![0, 1], vec![1]], vec![vec![1], vec![0]], vec![vec![0, 0], vec![1, 0]]];
    let quotients = vec![vec![0], vec![1]];
    let instances = variety_closure_instances(&corpus_langs, &sigma, &morphisms, &quotients)?;
    let mut t = Tally::default();
    for i in &instances {
        t.expect(i.aperiodic, || format!("{} is not aperiodic", i.description));
    }
    if instances.is_empty() {
        return Err(Error::Invalid("no closure instances".into()));
    }
    t.summary = format!("{} closure instances", instances.len());
    Ok(t)
}
