//! Deterministic automata over `Σ⁺` and their transition semigroups.

mod regex;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

pub use regex::Regex;
use rand::Rng;

use crate::algebra::{close, Alphabet, Recognizer, Symbol};
use crate::error::{Error, Result};
use crate::monad::{FreeElement, MonadKind};
use crate::order::{ElemSet, Sort};

/// Default cap on transition-semigroup size.
pub const SEMIGROUP_CAP: usize = 4096;

/// A total DFA. Only nonempty words count: acceptance of the empty word
/// (whether `start` is accepting) is irrelevant to the language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    start: usize,
    accepting: Vec<bool>,
    /// `trans[q * |Σ| + a]`
    trans: Vec<usize>,
}

impl Dfa {
    pub fn new(alphabet: Alphabet, start: usize, accepting: Vec<bool>, trans: Vec<usize>) -> Result<Self> {
        let n = accepting.len();
        if n == 0 {
            return Err(Error::Invalid("a DFA needs at least one state".into()));
        }
        if start >= n {
            return Err(Error::Invalid(format!("start state {start} out of range")));
        }
        if trans.len() != n * alphabet.len() {
            return Err(Error::Invalid("transition table is not total".into()));
        }
        if let Some(&q) = trans.iter().find(|&&q| q >= n) {
            return Err(Error::Invalid(format!("transition to unknown state {q}")));
        }
        if (0..alphabet.len()).any(|l| alphabet.sort(l) != Sort::FINITE) {
            return Err(Error::SortMismatch("DFA letters have sort 1".into()));
        }
        Ok(Dfa { alphabet, start, accepting, trans })
    }

    /// A uniformly random total DFA with `states` states and start state `0`.
    pub fn random<R: Rng + ?Sized>(alphabet: Alphabet, states: usize, rng: &mut R) -> Result<Self> {
        let states = states.max(1);
        let accepting = (0..states).map(|_| rng.gen_bool(0.5)).collect();
        let trans = (0..states * alphabet.len()).map(|_| rng.gen_range(0..states)).collect();
        Dfa::new(alphabet, 0, accepting, trans)
    }

    /// Compiles a regular expression over the letters it mentions.
    pub fn from_regex(text: &str) -> Result<Self> {
        let r = Regex::parse(text)?;
        let sigma = Alphabet::letters(r.letters().into_iter().map(String::from))?;
        r.to_dfa(&sigma)
    }

    /// Compiles a regular expression over a given alphabet.
    pub fn from_regex_over(text: &str, alphabet: &Alphabet) -> Result<Self> {
        Regex::parse(text)?.to_dfa(alphabet)
    }

    /// The language of all nonempty words.
    pub fn universal(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Dfa { alphabet, start: 0, accepting: vec![true], trans: vec![0; k] }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, letter: usize) -> usize {
        self.trans[q * self.alphabet.len() + letter]
    }

    pub fn run_from(&self, q: usize, word: &[usize]) -> usize {
        word.iter().fold(q, |q, &l| self.step(q, l))
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        !word.is_empty() && self.accepting[self.run_from(self.start, word)]
    }

    /// Accepts a string of one-character letters.
    pub fn accepts_str(&self, word: &str) -> Result<bool> {
        match self.alphabet.word(word)? {
            FreeElement::Word(w) => Ok(self.accepts(&w)),
            _ => unreachable!("Alphabet::word builds words"),
        }
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> usize {
        let n = self.states();
        let k = self.alphabet.len();
        let mut live: Vec<bool> = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if !live[q] && (0..k).any(|l| live[self.step(q, l)]) {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        live.iter().filter(|&&b| b).count()
    }

    /// Whether the language (of nonempty words) is empty.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.states()];
        let mut queue: VecDeque<usize> = (0..self.alphabet.len()).map(|l| self.step(self.start, l)).collect();
        while let Some(q) = queue.pop_front() {
            if seen[q] {
                continue;
            }
            if self.accepting[q] {
                return false;
            }
            seen[q] = true;
            queue.extend((0..self.alphabet.len()).map(|l| self.step(q, l)));
        }
        true
    }

    fn with_start_accepting(&self, accept: bool) -> Dfa {
        let n = self.states();
        let k = self.alphabet.len();
        let mut trans = self.trans.clone();
        trans.extend((0..k).map(|l| self.step(self.start, l)));
        let mut accepting = self.accepting.clone();
        accepting.push(accept);
        Dfa { alphabet: self.alphabet.clone(), start: n, accepting, trans }
    }

    /// Smallest DFA for the same language of nonempty words: the smaller of
    /// the minimal automata that accept or reject the empty word.
    pub fn minimize(&self) -> Dfa {
        let with = hopcroft(&self.with_start_accepting(true));
        let without = hopcroft(&self.with_start_accepting(false));
        if with.states() < without.states() {
            with
        } else {
            without
        }
    }

    /// Complement within `Σ⁺`.
    pub fn complement(&self) -> Dfa {
        Dfa {
            accepting: self.accepting.iter().map(|b| !b).collect(),
            ..self.clone()
        }
    }

    fn product(&self, other: &Dfa, f: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::Invalid("automata over different alphabets".into()));
        }
        let k = self.alphabet.len();
        let m = other.states();
        let n = self.states() * m;
        let mut trans = Vec::with_capacity(n * k);
        let mut accepting = Vec::with_capacity(n);
        for p in 0..self.states() {
            for q in 0..m {
                accepting.push(f(self.accepting[p], other.accepting[q]));
                trans.extend((0..k).map(|l| self.step(p, l) * m + other.step(q, l)));
            }
        }
        let start = self.start * m + other.start;
        Ok(Dfa { alphabet: self.alphabet.clone(), start, accepting, trans }.minimize())
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a || b)
    }

    /// `u⁻¹ L v⁻¹ = { w | u w v ∈ L }` restricted to nonempty `w`.
    pub fn derivative(&self, u: &[usize], v: &[usize]) -> Dfa {
        let start = self.run_from(self.start, u);
        let accepting = (0..self.states())
            .map(|q| self.accepting[self.run_from(q, v)])
            .collect();
        Dfa { alphabet: self.alphabet.clone(), start, accepting, trans: self.trans.clone() }.minimize()
    }

    /// `h⁻¹[L]` for the morphism sending each letter of `sigma` to a
    /// nonempty word over this automaton's alphabet.
    pub fn inverse_image(&self, sigma: Alphabet, h: &[Vec<usize>]) -> Result<Dfa> {
        if h.len() != sigma.len() || h.iter().any(Vec::is_empty) {
            return Err(Error::Invalid("a morphism needs one nonempty word per letter".into()));
        }
        if h.iter().flatten().any(|&l| l >= self.alphabet.len()) {
            return Err(Error::Invalid("image word uses an unknown letter".into()));
        }
        let k = sigma.len();
        let trans = (0..self.states())
            .flat_map(|q| h.iter().map(move |w| self.run_from(q, w)))
            .collect::<Vec<_>>();
        debug_assert_eq!(trans.len(), self.states() * k);
        Dfa::new(sigma, self.start, self.accepting.clone(), trans).map(|d| d.minimize())
    }

    /// Language equality on nonempty words.
    pub fn equivalent(&self, other: &Dfa) -> bool {
        self.alphabet == other.alphabet
            && self
                .product(other, |a, b| a != b)
                .map(|d| d.is_empty())
                .unwrap_or(false)
    }

    /// All nonempty words up to `max_len`, shortlex.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        let k = self.alphabet.len();
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            let next: Vec<Vec<usize>> = layer
                .iter()
                .flat_map(|w| {
                    (0..k).map(move |l| {
                        let mut w = w.clone();
                        w.push(l);
                        w
                    })
                })
                .collect();
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    pub fn show_word(&self, word: &[usize]) -> String {
        show_word(&self.alphabet, word)
    }

    /// Reads the line-based DFA format.
    pub fn parse(text: &str) -> Result<Dfa> {
        let mut alphabet: Option<Alphabet> = None;
        let mut states: Option<usize> = None;
        let mut start: Option<usize> = None;
        let mut accept: Vec<usize> = Vec::new();
        let mut trans: Vec<Option<usize>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<(usize, &str)> = tokens(line);
            let Some(&(c0, head)) = toks.first() else { continue };
            let args = &toks[1..];
            let num = |(c, t): (usize, &str)| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(line_no, c, format!("expected a number, found `{t}`")))
            };
            let state = |tok: (usize, &str), n: Option<usize>| -> Result<usize> {
                let q = num(tok)?;
                let n = n.ok_or_else(|| Error::parse(line_no, tok.0, "`states` must come first"))?;
                if q >= n {
                    return Err(Error::parse(line_no, tok.0, format!("state {q} out of range")));
                }
                Ok(q)
            };
            match head {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(Error::parse(line_no, c0, "duplicate `alphabet`"));
                    }
                    let a = Alphabet::letters(args.iter().map(|t| t.1))
                        .map_err(|e| Error::parse(line_no, c0, e.to_string()))?;
                    alphabet = Some(a);
                }
                "states" => {
                    if states.is_some() || args.len() != 1 {
                        return Err(Error::parse(line_no, c0, "expected one `states <n>` line"));
                    }
                    let n = num(args[0])?;
                    if n == 0 {
                        return Err(Error::parse(line_no, args[0].0, "a DFA needs at least one state"));
                    }
                    states = Some(n);
                }
                "start" => {
                    if start.is_some() || args.len() != 1 {
                        return Err(Error::parse(line_no, c0, "expected one `start <state>` line"));
                    }
                    start = Some(state(args[0], states)?);
                }
                "accept" => {
                    for &t in args {
                        accept.push(state(t, states)?);
                    }
                }
                "trans" => {
                    let [from, letter, to] = args else {
                        return Err(Error::parse(line_no, c0, "expected `trans <state> <letter> <state>`"));
                    };
                    let sigma = alphabet
                        .as_ref()
                        .ok_or_else(|| Error::parse(line_no, c0, "`alphabet` must come first"))?;
                    let p = state(*from, states)?;
                    let l = sigma
                        .lookup(letter.1)
                        .ok_or_else(|| Error::parse(line_no, letter.0, format!("unknown letter `{}`", letter.1)))?;
                    let q = state(*to, states)?;
                    let k = sigma.len();
                    trans.resize(states.unwrap_or(0) * k, None);
                    match trans[p * k + l] {
                        Some(old) if old != q => {
                            return Err(Error::parse(line_no, c0, "conflicting transition"));
                        }
                        _ => trans[p * k + l] = Some(q),
                    }
                }
                other => return Err(Error::parse(line_no, c0, format!("unknown directive `{other}`"))),
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::Invalid("missing `alphabet`".into()))?;
        let n = states.ok_or_else(|| Error::Invalid("missing `states`".into()))?;
        let start = start.ok_or_else(|| Error::Invalid("missing `start`".into()))?;
        let k = alphabet.len();
        trans.resize(n * k, None);
        let trans = trans
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| {
                    Error::Invalid(format!("missing transition from {} on `{}`", i / k, alphabet.name(i % k)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut accepting = vec![false; n];
        for q in accept {
            accepting[q] = true;
        }
        Dfa::new(alphabet, start, accepting, trans)
    }

    /// Transition semigroup as a recognizer: the letters act by their state
    /// transformations, `dot(f, g)` runs `f` then `g`, and the accepting set
    /// holds the transformations sending the start state to an accepting state.
    /// Elements are named by a shortest word realising them.
    pub fn to_recognizer(&self) -> Result<Recognizer> {
        self.to_recognizer_capped(SEMIGROUP_CAP)
    }

    pub fn to_recognizer_capped(&self, cap: usize) -> Result<Recognizer> {
        let n = self.states();
        let k = self.alphabet.len();
        let gens = (0..k)
            .map(|l| ((0..n).map(|q| self.step(q, l)).collect::<Vec<usize>>(), Sort::FINITE))
            .collect();
        let c = close(
            MonadKind::Word,
            &[Sort::FINITE],
            gens,
            |sym, args| match sym {
                Symbol::Dot => Ok(args[0].iter().map(|&q| args[1][q]).collect()),
                other => Err(Error::SortMismatch(format!("no `{other}` on words"))),
            },
            |a, b| a == b,
            |_, i| format!("#{i}"),
            cap,
        )?;
        let labels: Vec<FreeElement<usize>> = (0..k).map(|l| FreeElement::Word(vec![l])).collect();
        let names = c
            .witnesses(&labels)?
            .iter()
            .map(|w| match w {
                FreeElement::Word(w) => show_word(&self.alphabet, w),
                _ => unreachable!("word closures yield words"),
            })
            .collect();
        let algebra = Arc::new(c.algebra.renamed(names)?);
        let accepting: ElemSet = (0..c.keys.len())
            .filter(|&e| self.accepting[c.keys[e][self.start]])
            .collect();
        Recognizer::new(self.alphabet.clone(), algebra, c.generators, accepting, Sort::FINITE)
    }
}

impl fmt::Display for Dfa {
    /// The line-based file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {}", self.alphabet.names().join(" "))?;
        writeln!(f, "states {}", self.states())?;
        writeln!(f, "start {}", self.start)?;
        let acc: Vec<String> = (0..self.states())
            .filter(|&q| self.accepting[q])
            .map(|q| q.to_string())
            .collect();
        writeln!(f, "accept {}", acc.join(" "))?;
        for q in 0..self.states() {
            for l in 0..self.alphabet.len() {
                writeln!(f, "trans {q} {} {}", self.alphabet.name(l), self.step(q, l))?;
            }
        }
        Ok(())
    }
}

/// Concatenates one-character letter names, otherwise joins with `.`.
pub fn show_word(alphabet: &Alphabet, word: &[usize]) -> String {
    let sep = if alphabet.names().iter().all(|n| n.chars().count() == 1) { "" } else { "." };
    word.iter().map(|&l| alphabet.name(l)).collect::<Vec<_>>().join(sep)
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((line[..s].chars().count() + 1, &line[s..]));
    }
    out
}

/// Reachable part, then Hopcroft partition refinement. States are renumbered
/// in breadth-first order from the start.
fn hopcroft(dfa: &Dfa) -> Dfa {
    let k = dfa.alphabet.len();
    let mut order = vec![dfa.start];
    let mut index = vec![usize::MAX; dfa.states()];
    index[dfa.start] = 0;
    let mut i = 0;
    while i < order.len() {
        for l in 0..k {
            let q = dfa.step(order[i], l);
            if index[q] == usize::MAX {
                index[q] = order.len();
                order.push(q);
            }
        }
        i += 1;
    }
    let n = order.len();
    let step = |q: usize, l: usize| index[dfa.step(order[q], l)];
    let mut inverse: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
    for q in 0..n {
        for l in 0..k {
            inverse[l][step(q, l)].push(q);
        }
    }

    let (acc, rej): (Vec<usize>, Vec<usize>) = (0..n).partition(|&q| dfa.accepting[order[q]]);
    let mut blocks: Vec<Vec<usize>> = [acc, rej].into_iter().filter(|b| !b.is_empty()).collect();
    let mut block_of = vec![0usize; n];
    for (b, members) in blocks.iter().enumerate() {
        for &q in members {
            block_of[q] = b;
        }
    }
    let mut work: BTreeSet<(usize, usize)> = BTreeSet::new();
    if blocks.len() == 2 {
        let smaller = if blocks[0].len() <= blocks[1].len() { 0 } else { 1 };
        work.extend((0..k).map(|l| (smaller, l)));
    }
    while let Some(&(splitter, l)) = work.iter().next() {
        work.remove(&(splitter, l));
        let mut pre: Vec<usize> = blocks[splitter].iter().flat_map(|&q| inverse[l][q].iter().copied()).collect();
        pre.sort_unstable();
        pre.dedup();
        let mut touched: Vec<usize> = pre.iter().map(|&q| block_of[q]).collect();
        touched.sort_unstable();
        touched.dedup();
        for b in touched {
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                blocks[b].iter().partition(|q| pre.binary_search(q).is_ok());
            if outside.is_empty() {
                continue;
            }
            let nb = blocks.len();
            let (stay, moved) = if inside.len() <= outside.len() { (outside, inside) } else { (inside, outside) };
            for &q in &moved {
                block_of[q] = nb;
            }
            blocks[b] = stay;
            blocks.push(moved);
            work.extend((0..k).map(|m| (nb, m)));
        }
    }

    // number blocks by first appearance in breadth-first state order
    let mut renum = vec![usize::MAX; blocks.len()];
    let mut next = 0;
    for q in 0..n {
        let b = block_of[q];
        if renum[b] == usize::MAX {
            renum[b] = next;
            next += 1;
        }
    }
    let mut trans = vec![0; next * k];
    let mut accepting = vec![false; next];
    for q in 0..n {
        let b = renum[block_of[q]];
        accepting[b] = dfa.accepting[order[q]];
        for l in 0..k {
            trans[b * k + l] = renum[block_of[step(q, l)]];
        }
    }
    Dfa { alphabet: dfa.alphabet.clone(), start: 0, accepting, trans }
}
