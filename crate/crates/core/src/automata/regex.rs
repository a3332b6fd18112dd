use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::Dfa;
use crate::algebra::Alphabet;
use crate::error::{Error, Result};

/// Regular expressions over single-character letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Lit(char),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Opt(Box<Regex>),
}

impl Regex {
    pub fn parse(text: &str) -> Result<Regex> {
        let chars: Vec<(usize, char)> = text
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        let mut p = Parser { chars, pos: 0, end: text.chars().count() + 1 };
        let r = p.alt()?;
        if let Some(&(col, c)) = p.chars.get(p.pos) {
            return Err(Error::parse(1, col, format!("unexpected `{c}`")));
        }
        Ok(r)
    }

    /// Letters occurring in the expression, sorted.
    pub fn letters(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    /// Whether the expression matches the empty word. Languages live in
    /// `Σ⁺`, so compiled automata ignore it.
    pub fn matches_empty(&self) -> bool {
        match self {
            Regex::Lit(_) => false,
            Regex::Plus(r) => r.matches_empty(),
            Regex::Concat(rs) => rs.iter().all(Regex::matches_empty),
            Regex::Alt(rs) => rs.iter().any(Regex::matches_empty),
            Regex::Star(_) | Regex::Opt(_) => true,
        }
    }

    fn collect(&self, out: &mut BTreeSet<char>) {
        match self {
            Regex::Lit(c) => {
                out.insert(*c);
            }
            Regex::Concat(rs) | Regex::Alt(rs) => rs.iter().for_each(|r| r.collect(out)),
            Regex::Star(r) | Regex::Plus(r) | Regex::Opt(r) => r.collect(out),
        }
    }

    /// Compiles to the minimal DFA over `alphabet`, which must contain every
    /// letter of the expression.
    pub fn to_dfa(&self, alphabet: &Alphabet) -> Result<Dfa> {
        let mut letter_of = HashMap::new();
        for (i, n) in alphabet.names().iter().enumerate() {
            let mut cs = n.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => {
                    letter_of.insert(c, i);
                }
                _ => return Err(Error::Invalid(format!("regex letters are single characters, not `{n}`"))),
            }
        }
        for c in self.letters() {
            if !letter_of.contains_key(&c) {
                return Err(Error::Invalid(format!("letter `{c}` is not in the alphabet")));
            }
        }
        let mut nfa = Nfa::default();
        let (start, end) = nfa.build(self, &letter_of);
        Ok(nfa.determinise(start, end, alphabet.clone()).minimize())
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // parenthesise anything that is not atomic under a postfix operator
        fn atom(r: &Regex, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match r {
                Regex::Lit(_) => write!(f, "{r}"),
                _ => write!(f, "({r})"),
            }
        }
        match self {
            Regex::Lit(c) => write!(f, "{c}"),
            Regex::Concat(rs) => {
                for r in rs {
                    match r {
                        Regex::Alt(_) => write!(f, "({r})")?,
                        _ => write!(f, "{r}")?,
                    }
                }
                Ok(())
            }
            Regex::Alt(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{r}")?;
                }
                Ok(())
            }
            Regex::Star(r) => {
                atom(r, f)?;
                f.write_str("*")
            }
            Regex::Plus(r) => {
                atom(r, f)?;
                f.write_str("+")
            }
            Regex::Opt(r) => {
                atom(r, f)?;
                f.write_str("?")
            }
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|p| p.1)
    }

    fn col(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |p| p.0)
    }

    fn alt(&mut self) -> Result<Regex> {
        let mut parts = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Regex::Alt(parts) })
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.repeat()?);
        }
        match parts.len() {
            0 => Err(Error::parse(1, self.col(), "empty expression")),
            1 => Ok(parts.pop().unwrap()),
            _ => Ok(Regex::Concat(parts)),
        }
    }

    fn repeat(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        loop {
            r = match self.peek() {
                Some('*') => Regex::Star(Box::new(r)),
                Some('+') => Regex::Plus(Box::new(r)),
                Some('?') => Regex::Opt(Box::new(r)),
                _ => return Ok(r),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        let col = self.col();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let r = self.alt()?;
                if self.peek() != Some(')') {
                    return Err(Error::parse(1, self.col(), "expected `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            Some(c) if c.is_ascii_alphanumeric() => {
                self.pos += 1;
                Ok(Regex::Lit(c))
            }
            Some(c) => Err(Error::parse(1, col, format!("unexpected `{c}`"))),
            None => Err(Error::parse(1, col, "unexpected end of expression")),
        }
    }
}

/// Thompson automaton with epsilon moves (`None` labels).
#[derive(Default)]
struct Nfa {
    edges: Vec<Vec<(Option<usize>, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn edge(&mut self, from: usize, label: Option<usize>, to: usize) {
        self.edges[from].push((label, to));
    }

    fn build(&mut self, r: &Regex, letter_of: &HashMap<char, usize>) -> (usize, usize) {
        let s = self.state();
        let e = self.state();
        match r {
            Regex::Lit(c) => self.edge(s, Some(letter_of[c]), e),
            Regex::Concat(rs) => {
                let mut at = s;
                for r in rs {
                    let (a, b) = self.build(r, letter_of);
                    self.edge(at, None, a);
                    at = b;
                }
                self.edge(at, None, e);
            }
            Regex::Alt(rs) => {
                for r in rs {
                    let (a, b) = self.build(r, letter_of);
                    self.edge(s, None, a);
                    self.edge(b, None, e);
                }
            }
            Regex::Star(inner) | Regex::Plus(inner) | Regex::Opt(inner) => {
                let (a, b) = self.build(inner, letter_of);
                self.edge(s, None, a);
                self.edge(b, None, e);
                if !matches!(r, Regex::Plus(_)) {
                    self.edge(s, None, e);
                }
                if !matches!(r, Regex::Opt(_)) {
                    self.edge(b, None, a);
                }
            }
        }
        (s, e)
    }

    fn eclose(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(l, to) in &self.edges[q] {
                if l.is_none() && set.insert(to) {
                    stack.push(to);
                }
            }
        }
    }

    /// Subset construction; the empty subset becomes the dead state.
    fn determinise(&self, start: usize, end: usize, alphabet: Alphabet) -> Dfa {
        let k = alphabet.len();
        let mut init = BTreeSet::from([start]);
        self.eclose(&mut init);
        let mut index = HashMap::from([(init.clone(), 0usize)]);
        let mut sets = vec![init];
        let mut trans = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            for l in 0..k {
                let mut next = BTreeSet::new();
                for &q in &sets[i] {
                    for &(m, to) in &self.edges[q] {
                        if m == Some(l) {
                            next.insert(to);
                        }
                    }
                }
                self.eclose(&mut next);
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    sets.len() - 1
                });
                trans.push(id);
            }
            i += 1;
        }
        let accepting = sets.iter().map(|s| s.contains(&end)).collect();
        Dfa { alphabet, start: 0, accepting, trans }
    }
}
