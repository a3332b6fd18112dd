//! First-order logic over finite words with order, successor and letter
//! predicates: Ehrenfeucht–Fraïssé types, rank-`m` theory algebras and the
//! first-order definability decision.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rand::Rng;

use crate::algebra::{Alphabet, FinAlgebra, Recognizer};
use crate::automata::{show_word, Dfa};
use crate::error::{Error, Result};
use crate::monad::MonadKind;
use crate::order::{Elem, ElemSet, Sort, SortedOrderedSet};
use crate::profinite::{library, satisfies_all, Assignment, Inequality};
use crate::syntactic::{syntactic_algebra, SyntacticResult};

/// Default highest rank tried by [`fo_definable`].
pub const RANK_BOUND: usize = 5;
/// Default cap on the number of rank-`m` classes.
pub const CLASS_CAP: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum TypeKey {
    /// Rank 0 when no adjacent pebble could observe the segment.
    Blind,
    Empty,
    Nonempty,
    /// Choices of one position: type of the part before, letter, type of the
    /// part after.
    Split(u8, bool, bool, BTreeSet<(u32, usize, u32)>),
}

/// Rank-`k` types of word segments. A segment is attached on a side when a
/// pebble sits right next to it there, so that its end is visible through
/// the successor relation. The type of a whole word is its type as a segment
/// attached on neither side; two words have the same rank-`m` type iff
/// Duplicator wins the `m`-round game on them.
#[derive(Debug)]
#[derive(Default)]
pub struct EfTyper {
    ids: HashMap<TypeKey, u32>,
    /// Words as nodes of a trie; node 0 is the empty word.
    trie: HashMap<(u32, usize), u32>,
    memo: HashMap<(u32, u8, bool, bool), u32>,
}


impl EfTyper {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, key: TypeKey) -> u32 {
        let n = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(n)
    }

    fn node(&mut self, s: &[usize]) -> u32 {
        let mut at = 0;
        for &l in s {
            let fresh = self.trie.len() as u32 + 1;
            at = *self.trie.entry((at, l)).or_insert(fresh);
        }
        at
    }

    fn segment(&mut self, s: &[usize], k: u8, left: bool, right: bool) -> u32 {
        let node = self.node(s);
        if let Some(&id) = self.memo.get(&(node, k, left, right)) {
            return id;
        }
        let key = if k == 0 {
            match (left && right, s.is_empty()) {
                (false, _) => TypeKey::Blind,
                (true, true) => TypeKey::Empty,
                (true, false) => TypeKey::Nonempty,
            }
        } else if s.is_empty() {
            TypeKey::Empty
        } else {
            let mut choices = BTreeSet::new();
            for y in 0..s.len() {
                let before = self.segment(&s[..y], k - 1, left, true);
                let after = self.segment(&s[y + 1..], k - 1, true, right);
                choices.insert((before, s[y], after));
            }
            TypeKey::Split(k, left, right, choices)
        };
        let id = self.intern(key);
        self.memo.insert((node, k, left, right), id);
        id
    }

    /// The rank-`m` type of a word, as an id local to this typer.
    pub fn word_type(&mut self, w: &[usize], m: usize) -> u32 {
        self.segment(w, m.min(u8::MAX as usize) as u8, false, false)
    }
}

/// Whether Duplicator wins the `m`-round game on `u` and `w`.
pub fn ef_equiv(u: &[usize], w: &[usize], m: usize) -> bool {
    let mut t = EfTyper::new();
    t.word_type(u, m) == t.word_type(w, m)
}

/// Rank-`m` classes reachable by appending letters, paired with a second
/// component that letters act on from the right.
struct Discovery<S> {
    keys: Vec<(u32, S)>,
    /// Shortlex-least word of each key.
    words: Vec<Vec<usize>>,
    /// `right[i][l]`: the key of `words[i]` followed by `l`.
    right: Vec<Vec<usize>>,
    /// Key of each letter.
    letters: Vec<usize>,
}

fn discover<S: Clone + Eq + std::hash::Hash>(
    typer: &mut EfTyper,
    letters: usize,
    m: usize,
    init: impl Fn(usize) -> S,
    step: impl Fn(&S, usize) -> S,
    cap: usize,
) -> Result<Discovery<S>> {
    let max_len = rep_cap(m);
    let mut index: HashMap<(u32, S), usize> = HashMap::new();
    let mut d = Discovery {
        keys: Vec::new(),
        words: Vec::new(),
        right: Vec::new(),
        letters: Vec::new(),
    };
    let mut add = |key: (u32, S), w: Vec<usize>, d: &mut Discovery<S>| -> Result<usize> {
        if let Some(&i) = index.get(&key) {
            return Ok(i);
        }
        if d.keys.len() >= cap {
            return Err(Error::BoundExceeded(format!("more than {cap} rank-{m} classes")));
        }
        if w.len() > max_len {
            return Err(Error::BoundExceeded(format!(
                "a rank-{m} class needs a representative longer than {max_len}"
            )));
        }
        index.insert(key.clone(), d.keys.len());
        d.keys.push(key);
        d.words.push(w);
        Ok(d.keys.len() - 1)
    };
    for l in 0..letters {
        let e = add((typer.word_type(&[l], m), init(l)), vec![l], &mut d)?;
        d.letters.push(e);
    }
    let mut i = 0;
    while i < d.keys.len() {
        let mut row = Vec::with_capacity(letters);
        for l in 0..letters {
            let mut w = d.words[i].clone();
            w.push(l);
            let key = (typer.word_type(&w, m), step(&d.keys[i].1, l));
            row.push(add(key, w, &mut d)?);
        }
        d.right.push(row);
        i += 1;
    }
    Ok(d)
}

/// Longest representative allowed at rank `m`.
pub fn rep_cap(m: usize) -> usize {
    1usize.checked_shl(m as u32 + 3).unwrap_or(usize::MAX)
}

/// `Θ_m Σ`: rank-`m` classes of nonempty words under concatenation.
#[derive(Debug)]
pub struct TheoryAlgebra {
    pub rank: usize,
    pub alphabet: Alphabet,
    pub algebra: Arc<FinAlgebra>,
    /// Shortlex-least representative of each class.
    pub representatives: Vec<Vec<usize>>,
    /// Class of each letter.
    pub letters: Vec<Elem>,
    typer: Mutex<EfTyper>,
    class_of_type: HashMap<u32, Elem>,
}

impl TheoryAlgebra {
    /// Class of a nonempty word, computed from its type.
    pub fn class_of(&self, w: &[usize]) -> Result<Elem> {
        if w.is_empty() {
            return Err(Error::Invalid("empty word".into()));
        }
        let id = self.typer.lock().expect("typer lock").word_type(w, self.rank);
        self.class_of_type
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Invalid("word type outside the closure".into()))
    }

    /// `θ(w)` as the product of its letter classes.
    pub fn theta(&self, w: &[usize]) -> Result<Elem> {
        let classes: Vec<Elem> = w.iter().map(|&l| self.letters[l]).collect();
        self.algebra.fold(&classes)
    }

    /// Checks `class(uv) = class(u) · class(v)` on `samples` random pairs of
    /// words of length at most `max_len`; returns a failing pair.
    pub fn check_compositionality<R: Rng>(
        &self,
        samples: usize,
        max_len: usize,
        rng: &mut R,
    ) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        let k = self.alphabet.len();
        let word = |rng: &mut R| -> Vec<usize> { (0..rng.gen_range(1..=max_len)).map(|_| rng.gen_range(0..k)).collect() };
        for _ in 0..samples {
            let u = word(rng);
            let v = word(rng);
            let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
            let prod = self.algebra.dot(self.class_of(&u)?, self.class_of(&v)?);
            if self.class_of(&uv)? != prod || self.theta(&uv)? != prod {
                return Ok(Some((u, v)));
            }
        }
        Ok(None)
    }

    pub fn recognizer(&self, accepting: ElemSet) -> Result<Recognizer> {
        Recognizer::new(self.alphabet.clone(), self.algebra.clone(), self.letters.clone(), accepting, Sort::FINITE)
    }
}

/// Builds `Θ_m Σ`. Classes are found by appending letters to shortest
/// representatives; the product of two classes is read off by appending the
/// letters of the second representative, and every table entry is checked
/// against the class of the concatenated representatives.
pub fn theory_algebra(alphabet: &Alphabet, m: usize) -> Result<TheoryAlgebra> {
    theory_algebra_capped(alphabet, m, CLASS_CAP)
}

pub fn theory_algebra_capped(alphabet: &Alphabet, m: usize, cap: usize) -> Result<TheoryAlgebra> {
    check_alphabet(alphabet)?;
    let mut typer = EfTyper::new();
    let d = discover(&mut typer, alphabet.len(), m, |_| (), |_, _| (), cap)?;
    let n = d.keys.len();
    let mut table = vec![0; n * n];
    for c in 0..n {
        for e in 0..n {
            let product = d.words[e].iter().fold(c, |at, &l| d.right[at][l]);
            let uv: Vec<usize> = d.words[c].iter().chain(&d.words[e]).copied().collect();
            let direct = typer.word_type(&uv, m);
            if d.keys[product].0 != direct {
                return Err(Error::Disagreement(format!(
                    "rank-{m} classes of {} and {} do not compose",
                    show_word(alphabet, &d.words[c]),
                    show_word(alphabet, &d.words[e])
                )));
            }
            table[c * n + e] = product;
        }
    }
    let names: Vec<String> = d.words.iter().map(|w| show_word(alphabet, w)).collect();
    let carrier = Arc::new(SortedOrderedSet::discrete(Sort::FINITE, names)?);
    let algebra = Arc::new(FinAlgebra::from_fn(MonadKind::Word, carrier, |_, x| table[x[0] * n + x[1]])?);
    Ok(TheoryAlgebra {
        rank: m,
        alphabet: alphabet.clone(),
        algebra,
        letters: d.letters,
        class_of_type: d.keys.iter().enumerate().map(|(e, &(id, ()))| (id, e)).collect(),
        representatives: d.words,
        typer: Mutex::new(typer),
    })
}

fn check_alphabet(alphabet: &Alphabet) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::Invalid("empty alphabet".into()));
    }
    if (0..alphabet.len()).any(|l| alphabet.sort(l) != Sort::FINITE) {
        return Err(Error::SortMismatch("letters must have sort 1".into()));
    }
    Ok(())
}

/// Default cap on the pairs explored by [`recognizes_at_rank`].
pub const PAIR_CAP: usize = 1 << 16;

/// Whether `θ_m` recognises the language of `rec`: no rank-`m` class
/// contains both members and non-members.
pub fn recognizes_at_rank(rec: &Recognizer, m: usize) -> Result<bool> {
    Ok(rank_conflict(rec, m)?.is_none())
}

/// Two words of the same rank-`m` class, one in the language and one not.
/// Explores the image of `⟨θ_m, φ⟩` from the letter pairs.
pub fn rank_conflict(rec: &Recognizer, m: usize) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if rec.kind() != MonadKind::Word {
        return Err(Error::SortMismatch("rank recognition is defined for words".into()));
    }
    check_alphabet(&rec.alphabet)?;
    let a = &rec.algebra;
    let mut typer = EfTyper::new();
    let d = discover(
        &mut typer,
        rec.alphabet.len(),
        m,
        |l| rec.beta[l],
        |&x, l| a.dot(x, rec.beta[l]),
        PAIR_CAP,
    )?;
    let mut seen: HashMap<u32, (bool, usize)> = HashMap::new();
    for (i, &(c, x)) in d.keys.iter().enumerate() {
        let inside = rec.accepting.contains(&x);
        match seen.get(&c) {
            Some(&(v, j)) if v != inside => {
                let (yes, no) = if v { (j, i) } else { (i, j) };
                return Ok(Some((d.words[yes].clone(), d.words[no].clone())));
            }
            Some(_) => {}
            None => {
                seen.insert(c, (inside, i));
            }
        }
    }
    Ok(None)
}

/// The outcome of [`fo_definable`] with evidence from both deciders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinabilityVerdict {
    pub definable: bool,
    /// Least rank whose theory morphism recognises the language.
    pub rank: Option<usize>,
    /// Highest rank requested.
    pub bound: usize,
    /// Highest rank actually decided; below `bound` when a rank's classes
    /// exceed the caps.
    pub decided_up_to: Option<usize>,
    /// A failed aperiodicity inequality and the assignment, by element name.
    pub counterexample: Option<(Inequality, Vec<(String, String)>)>,
    /// Aperiodic, but no rank up to the bound was found.
    pub inconclusive_rank: bool,
    /// Size of the syntactic algebra.
    pub syntactic_size: usize,
}

/// Decides first-order definability twice: by the aperiodicity identities on
/// the syntactic algebra, and by searching for a rank `m` whose theory
/// morphism recognises the language.
pub fn fo_definable(dfa: &Dfa) -> Result<DefinabilityVerdict> {
    fo_definable_with(dfa, RANK_BOUND)
}

pub fn fo_definable_with(dfa: &Dfa, bound: usize) -> Result<DefinabilityVerdict> {
    let rec = dfa.minimize().to_recognizer()?;
    let syn = syntactic_algebra(&rec)?;
    let cex = aperiodicity_counterexample(&syn)?;
    let mut rank = None;
    let mut decided_up_to = None;
    for m in 0..=bound {
        match recognizes_at_rank(&rec, m) {
            Ok(true) => {
                rank = Some(m);
                decided_up_to = Some(m);
                break;
            }
            Ok(false) => decided_up_to = Some(m),
            // an unbuildable theory algebra leaves the sweep inconclusive
            Err(Error::BoundExceeded(_)) => break,
            Err(e) => return Err(e),
        }
    }
    if let (Some(m), Some((ineq, _))) = (rank, &cex) {
        return Err(Error::Disagreement(format!(
            "rank {m} recognises the language but `{ineq}` fails in its syntactic algebra"
        )));
    }
    Ok(DefinabilityVerdict {
        definable: cex.is_none(),
        rank,
        bound,
        decided_up_to,
        inconclusive_rank: cex.is_none() && rank.is_none(),
        counterexample: cex,
        syntactic_size: syn.algebra.len(),
    })
}

pub fn aperiodicity_counterexample(syn: &SyntacticResult) -> Result<Option<(Inequality, Vec<(String, String)>)>> {
    let ap = library("aperiodic").expect("library set");
    Ok(satisfies_all(&syn.algebra, &ap)?.map(|(ineq, beta)| (ineq, named(&syn.algebra, &beta))))
}

fn named(alg: &FinAlgebra, beta: &Assignment) -> Vec<(String, String)> {
    beta.iter().map(|(x, &e)| (x.clone(), alg.name(e).to_owned())).collect()
}

/// Whether `π⁻¹(↑a)`, restricted to words over `C`, is first-order definable
/// for every element `a` of sort `1`.
pub fn definably_embedded(alg: &Arc<FinAlgebra>, c: &[Elem]) -> Result<bool> {
    if alg.kind() != MonadKind::Word {
        return Err(Error::SortMismatch("definability is decided for word algebras".into()));
    }
    if c.is_empty() {
        return Ok(true);
    }
    let sigma = Alphabet::letters((0..c.len()).map(|i| format!("c{i}")))?;
    for &a in alg.elements_of(Sort::FINITE) {
        let up: ElemSet = alg
            .elements_of(Sort::FINITE)
            .iter()
            .copied()
            .filter(|&b| alg.carrier().leq(a, b))
            .collect();
        let rec = Recognizer::new(sigma.clone(), alg.clone(), c.to_vec(), up, Sort::FINITE)?;
        let syn = syntactic_algebra(&rec)?;
        if aperiodicity_counterexample(&syn)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every language recognised by `alg` is first-order definable,
/// decided on one generating set.
pub fn is_definable_algebra(alg: &Arc<FinAlgebra>) -> Result<bool> {
    let gens = alg.elements_of(Sort::FINITE).to_vec();
    definably_embedded(alg, &gens)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::algebra::tests::cyclic;
    use crate::order::SortedOrderedSet;

    /// The game itself, on explicit pebble lists.
    fn duplicator_wins(u: &[usize], w: &[usize], pu: &mut Vec<usize>, pw: &mut Vec<usize>, rounds: usize) -> bool {
        for i in 0..pu.len() {
            if u[pu[i]] != w[pw[i]] {
                return false;
            }
            for j in 0..pu.len() {
                if (pu[i] <= pu[j]) != (pw[i] <= pw[j]) || (pu[i] + 1 == pu[j]) != (pw[i] + 1 == pw[j]) {
                    return false;
                }
            }
        }
        if rounds == 0 {
            return true;
        }
        for swap in [false, true] {
            let (a, b) = if swap { (w, u) } else { (u, w) };
            for x in 0..a.len() {
                let mut answered = false;
                for y in 0..b.len() {
                    let (xu, yw) = if swap { (y, x) } else { (x, y) };
                    pu.push(xu);
                    pw.push(yw);
                    let ok = duplicator_wins(u, w, pu, pw, rounds - 1);
                    pu.pop();
                    pw.pop();
                    if ok {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    return false;
                }
            }
        }
        true
    }

    fn words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
        let sigma = Alphabet::letters((0..k).map(|i| ((b'a' + i as u8) as char).to_string())).unwrap();
        Dfa::universal(sigma).words_up_to(max_len)
    }

    #[test]
    fn typer_matches_the_game() {
        let ws = words(2, 4);
        let mut typer = EfTyper::new();
        for m in 0..=3 {
            for u in &ws {
                for w in &ws {
                    let game = duplicator_wins(u, w, &mut vec![], &mut vec![], m);
                    assert_eq!(typer.word_type(u, m) == typer.word_type(w, m), game, "{u:?} {w:?} m={m}");
                }
            }
        }
    }

    #[test]
    fn ef_examples() {
        assert!(ef_equiv(&[0, 1, 1], &[0, 1, 1], 3));
        assert!(!ef_equiv(&[0, 1], &[1, 0], 2));
        for u in words(1, 8) {
            for w in words(1, 8) {
                assert!(ef_equiv(&u, &w, 1));
            }
        }
        assert!(ef_equiv(&[0; 7], &[0; 8], 2));
        assert!(!ef_equiv(&[0; 2], &[0; 3], 2));
    }

    #[test]
    fn types_refine_with_rank_and_compose() {
        let ws = words(2, 5);
        let mut typer = EfTyper::new();
        for m in 0..=2 {
            for u in &ws {
                for w in &ws {
                    let same = typer.word_type(u, m + 1) == typer.word_type(w, m + 1);
                    if same {
                        assert_eq!(typer.word_type(u, m), typer.word_type(w, m));
                    }
                }
            }
        }
        // u ≡ u' and v ≡ v' give uv ≡ u'v'
        let short = words(2, 3);
        for m in 0..=2 {
            let ty: Vec<u32> = short.iter().map(|w| typer.word_type(w, m)).collect();
            for (i, u) in short.iter().enumerate() {
                for (j, u2) in short.iter().enumerate().filter(|&(j, _)| ty[j] == ty[i]) {
                    let _ = j;
                    for v in &short {
                        let uv: Vec<usize> = u.iter().chain(v).copied().collect();
                        let u2v: Vec<usize> = u2.iter().chain(v).copied().collect();
                        assert_eq!(typer.word_type(&uv, m), typer.word_type(&u2v, m));
                    }
                }
            }
        }
    }

    #[test]
    fn theory_algebra_examples() {
        let ab = Alphabet::letters(["a", "b"]).unwrap();
        assert_eq!(theory_algebra(&ab, 0).unwrap().algebra.len(), 1);
        let t1 = theory_algebra(&ab, 1).unwrap();
        assert_eq!(t1.algebra.len(), 3);
        let (a, b) = (t1.letters[0], t1.letters[1]);
        let both = t1.class_of(&[0, 1]).unwrap();
        assert_eq!(t1.algebra.dot(a, b), both);
        assert!(both != a && both != b);
        assert_eq!(t1.representatives, vec![vec![0], vec![1], vec![0, 1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 0..=1 {
            let t = theory_algebra(&ab, m).unwrap();
            assert!(t.check_compositionality(300, 6, &mut rng).unwrap().is_none());
        }
        assert!(matches!(theory_algebra(&ab, 2), Err(Error::BoundExceeded(_))));
        // over one letter, a^n for n below a threshold are pairwise apart
        let a = Alphabet::letters(["a"]).unwrap();
        let sizes: Vec<usize> = (0..=4).map(|m| theory_algebra(&a, m).unwrap().algebra.len()).collect();
        for (m, &n) in sizes.iter().enumerate() {
            let t = theory_algebra(&a, m).unwrap();
            assert!(t.check_compositionality(200, 3 * n, &mut rng).unwrap().is_none());
            for (i, w) in t.representatives.iter().enumerate() {
                assert_eq!(w.len(), i + 1);
            }
            let last = vec![0; n];
            assert!(ef_equiv(&last, &[last.clone(), vec![0]].concat(), m));
            if n > 1 {
                assert!(!ef_equiv(&last, &last[1..], m));
            }
        }
        assert_eq!(sizes[..2], [1, 1]);
        assert!(sizes.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn rank_recognition() {
        let ab = Alphabet::letters(["a", "b"]).unwrap();
        let all = Dfa::universal(ab.clone()).to_recognizer().unwrap();
        assert!(recognizes_at_rank(&all, 0).unwrap());
        let aa = Dfa::from_regex("(a|b)*aa(a|b)*").unwrap().to_recognizer().unwrap();
        let least = (0..=3).find(|&m| recognizes_at_rank(&aa, m).unwrap());
        assert_eq!(least, Some(2));
        let even = Dfa::from_regex("(aa)+").unwrap().to_recognizer().unwrap();
        for m in 0..=RANK_BOUND {
            let (yes, no) = rank_conflict(&even, m).unwrap().expect("parity is not first-order");
            assert!(ef_equiv(&yes, &no, m));
            assert_eq!(yes.len() % 2, 0);
            assert_eq!(no.len() % 2, 1);
        }
    }

    #[test]
    fn definability_verdicts() {
        let v = fo_definable(&Dfa::from_regex("(a|b)*aa(a|b)*").unwrap()).unwrap();
        assert!(v.definable && v.rank == Some(2) && !v.inconclusive_rank);
        assert_eq!(v.syntactic_size, 5);
        let v = fo_definable(&Dfa::from_regex("(aa)+").unwrap()).unwrap();
        assert!(!v.definable && v.rank.is_none());
        let (ineq, beta) = v.counterexample.unwrap();
        assert_eq!(ineq.to_string(), "x^w x <= x^w");
        assert_eq!(beta, vec![("x".to_owned(), "a".to_owned())]);
        let ab = Alphabet::letters(["a", "b"]).unwrap();
        let v = fo_definable(&Dfa::universal(ab)).unwrap();
        assert!(v.definable && v.rank == Some(0));
    }

    #[test]
    fn definable_algebras() {
        let one = Arc::new(
            FinAlgebra::new(
                MonadKind::Word,
                Arc::new(SortedOrderedSet::discrete(Sort::FINITE, ["1"]).unwrap()),
                |_, _| 0,
            )
            .unwrap(),
        );
        assert!(definably_embedded(&one, &[0]).unwrap());
        assert!(is_definable_algebra(&one).unwrap());
        let rec = Dfa::from_regex("(a|b)*aa(a|b)*").unwrap().to_recognizer().unwrap();
        let syn = syntactic_algebra(&rec).unwrap();
        assert!(definably_embedded(&syn.algebra, &syn.beta).unwrap());
        assert!(is_definable_algebra(&syn.algebra).unwrap());
        let z2 = Arc::new(cyclic(2));
        assert!(!definably_embedded(&z2, &[1]).unwrap());
        assert!(!is_definable_algebra(&z2).unwrap());
    }
}
