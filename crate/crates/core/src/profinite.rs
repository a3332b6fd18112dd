//! Omega-terms, their values in finite algebras, and satisfaction of
//! inequalities between them.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::monad::MonadKind;
use crate::order::{Elem, Sort};

/// Default bound on the number of variables of an inequality.
pub const MAX_VARIABLES: usize = 4;

/// Terms built from variables by products and idempotent powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OmegaTerm {
    Var(String),
    /// Product of at least two factors. Every factor has sort `1`, except
    /// that the last one may have sort `inf` over omega-words.
    Concat(Vec<OmegaTerm>),
    /// `t^w`: the idempotent power of a sort-`1` term.
    OmegaPow(Box<OmegaTerm>),
    /// `t^inf`: the infinite power of a sort-`1` term, of sort `inf`.
    InfPow(Box<OmegaTerm>),
}

impl OmegaTerm {
    pub fn parse(text: &str) -> Result<OmegaTerm> {
        let mut p = Parser::new(text);
        let t = p.term()?;
        p.finish()?;
        Ok(t)
    }

    pub fn var(name: &str) -> OmegaTerm {
        OmegaTerm::Var(name.to_owned())
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            OmegaTerm::Var(x) => {
                if !out.contains(&x.as_str()) {
                    out.push(x);
                }
            }
            OmegaTerm::Concat(ts) => ts.iter().for_each(|t| t.collect(out)),
            OmegaTerm::OmegaPow(t) | OmegaTerm::InfPow(t) => t.collect(out),
        }
    }

    /// Sort of the term, checking sort consistency.
    pub fn sort(&self) -> Result<Sort> {
        match self {
            OmegaTerm::Var(_) => Ok(Sort::FINITE),
            OmegaTerm::Concat(ts) => {
                let (last, init) = ts.split_last().ok_or_else(|| Error::Invalid("empty product".into()))?;
                for t in init {
                    if t.sort()? != Sort::FINITE {
                        return Err(Error::SortMismatch(format!("`{t}` of sort inf is not the last factor")));
                    }
                }
                last.sort()
            }
            OmegaTerm::OmegaPow(t) | OmegaTerm::InfPow(t) => {
                if t.sort()? != Sort::FINITE {
                    return Err(Error::SortMismatch(format!("power of `{t}`, which has sort inf")));
                }
                Ok(if matches!(self, OmegaTerm::InfPow(_)) { Sort::INFINITE } else { Sort::FINITE })
            }
        }
    }

    fn atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaTerm::Concat(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for OmegaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaTerm::Var(x) => f.write_str(x),
            OmegaTerm::Concat(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    t.atom(f)?;
                }
                Ok(())
            }
            OmegaTerm::OmegaPow(t) => {
                t.atom(f)?;
                f.write_str("^w")
            }
            OmegaTerm::InfPow(t) => {
                t.atom(f)?;
                f.write_str("^inf")
            }
        }
    }
}

/// `lhs <= rhs` over the union of their variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub lhs: OmegaTerm,
    pub rhs: OmegaTerm,
}

impl Inequality {
    pub fn new(lhs: OmegaTerm, rhs: OmegaTerm) -> Result<Self> {
        let (s, t) = (lhs.sort()?, rhs.sort()?);
        if s != t {
            return Err(Error::SortMismatch(format!("`{lhs}` has sort {s} but `{rhs}` has sort {t}")));
        }
        Ok(Inequality { lhs, rhs })
    }

    /// `s <= t`, or `s = t` for both directions.
    pub fn parse(text: &str) -> Result<Vec<Inequality>> {
        let mut p = Parser::new(text);
        let lhs = p.term()?;
        let col = p.col();
        let both = if p.eat_str("<=") {
            false
        } else if p.eat_str("=") {
            true
        } else {
            return Err(Error::parse(1, col, "expected `<=` or `=`"));
        };
        let rhs = p.term()?;
        p.finish()?;
        let mut out = vec![Inequality::new(lhs.clone(), rhs.clone())?];
        if both {
            out.push(Inequality::new(rhs, lhs)?);
        }
        Ok(out)
    }

    /// One inequality per nonblank line; `#` starts a comment.
    pub fn parse_set(text: &str) -> Result<Vec<Inequality>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let parsed = Inequality::parse(line).map_err(|e| match e {
                Error::Parse { column, message, .. } => Error::Parse { line: i + 1, column, message },
                other => other,
            })?;
            out.extend(parsed);
        }
        Ok(out)
    }

    /// Variables of both sides, sorted by name.
    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self
            .lhs
            .variables()
            .into_iter()
            .chain(self.rhs.variables())
            .map(str::to_owned)
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

/// Serialises a set one inequality per line.
pub fn format_set(set: &[Inequality]) -> String {
    set.iter().map(|i| format!("{i}\n")).collect()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { chars: text.chars().collect(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn col(&mut self) -> usize {
        self.skip_ws();
        self.pos + 1
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(Error::parse(1, self.pos + 1, format!("unexpected `{c}`"))),
        }
    }

    fn term(&mut self) -> Result<OmegaTerm> {
        let mut factors = Vec::new();
        while matches!(self.peek(), Some(c) if c == '(' || c.is_alphabetic()) {
            factors.push(self.factor()?);
        }
        match factors.len() {
            0 => Err(Error::parse(1, self.col(), "expected a term")),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(OmegaTerm::Concat(factors)),
        }
    }

    /// A letter followed by digits and primes, so that `xy` is two variables.
    fn ident(&mut self) -> String {
        let mut s = String::new();
        s.push(self.chars[self.pos]);
        self.pos += 1;
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() || c == '\'' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn factor(&mut self) -> Result<OmegaTerm> {
        let mut t = if self.peek() == Some('(') {
            self.pos += 1;
            let t = self.term()?;
            if self.peek() != Some(')') {
                return Err(Error::parse(1, self.col(), "expected `)`"));
            }
            self.pos += 1;
            t
        } else {
            OmegaTerm::Var(self.ident())
        };
        // `^` binds tighter than juxtaposition and may not be preceded by space
        while self.chars.get(self.pos) == Some(&'^') {
            self.pos += 1;
            if self.eat_exact("inf") {
                t = OmegaTerm::InfPow(Box::new(t));
            } else if self.eat_exact("w") {
                t = OmegaTerm::OmegaPow(Box::new(t));
            } else {
                return Err(Error::parse(1, self.pos + 1, "expected `w` or `inf` after `^`"));
            }
        }
        Ok(t)
    }

    fn eat_exact(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        let end = self.pos + n;
        let matches = self.chars.len() >= end && self.chars[self.pos..end].iter().copied().eq(s.chars());
        let boundary = !self.chars.get(end).is_some_and(|c| c.is_ascii_digit() || *c == '\'');
        if matches && boundary {
            self.pos = end;
            true
        } else {
            false
        }
    }
}

/// Variable assignment.
pub type Assignment = BTreeMap<String, Elem>;

fn self_product(alg: &FinAlgebra, a: Elem, b: Elem) -> Result<Elem> {
    match alg.kind() {
        MonadKind::Tree { .. } => alg.comp(a, &[Some(b)]),
        _ => Ok(alg.dot(a, b)),
    }
}

/// The idempotent power of `a`: the unique idempotent among `a, a², a³, …`.
pub fn omega_power(alg: &FinAlgebra, a: Elem) -> Result<Elem> {
    if alg.sort_of(a) != Sort::FINITE {
        return Err(Error::SortMismatch(format!("`{}` is not of sort 1", alg.name(a))));
    }
    let bound = alg.elements_of(Sort::FINITE).len() + 1;
    let mut p = a;
    for _ in 0..bound {
        if self_product(alg, p, p)? == p {
            return Ok(p);
        }
        p = self_product(alg, p, a)?;
    }
    Err(Error::LawViolation(format!("powers of `{}` never become idempotent", alg.name(a))))
}

/// `val(t; β)`.
pub fn eval_term(alg: &FinAlgebra, beta: &Assignment, t: &OmegaTerm) -> Result<Elem> {
    match t {
        OmegaTerm::Var(x) => {
            let e = *beta
                .get(x)
                .ok_or_else(|| Error::Invalid(format!("variable `{x}` is unassigned")))?;
            if e >= alg.len() || alg.sort_of(e) != Sort::FINITE {
                return Err(Error::SortMismatch(format!("`{x}` must be assigned a sort-1 element")));
            }
            Ok(e)
        }
        OmegaTerm::Concat(ts) => {
            let vals = ts.iter().map(|t| eval_term(alg, beta, t)).collect::<Result<Vec<_>>>()?;
            let (&last, init) = vals.split_last().expect("nonempty product");
            if alg.sort_of(last) == Sort::INFINITE {
                if init.is_empty() {
                    return Ok(last);
                }
                let mut acc = init[0];
                for &x in &init[1..] {
                    acc = self_product(alg, acc, x)?;
                }
                Ok(alg.mix(acc, last))
            } else {
                let mut acc = vals[0];
                for &x in &vals[1..] {
                    if alg.sort_of(x) != Sort::FINITE {
                        return Err(Error::SortMismatch("sort-inf factor before the end".into()));
                    }
                    acc = self_product(alg, acc, x)?;
                }
                Ok(acc)
            }
        }
        OmegaTerm::OmegaPow(t) => omega_power(alg, eval_term(alg, beta, t)?),
        OmegaTerm::InfPow(t) => {
            if alg.kind() != MonadKind::OmegaUp || !alg.sorts().contains(&Sort::INFINITE) {
                return Err(Error::SortMismatch("`^inf` needs an omega algebra".into()));
            }
            Ok(alg.omega(eval_term(alg, beta, t)?))
        }
    }
}

/// Whether `alg` satisfies `ineq` for all assignments; on failure, the first
/// counterexample in enumeration order.
pub fn satisfies(alg: &FinAlgebra, ineq: &Inequality) -> Result<Option<Assignment>> {
    satisfies_with(alg, ineq, MAX_VARIABLES)
}

pub fn satisfies_with(alg: &FinAlgebra, ineq: &Inequality, max_vars: usize) -> Result<Option<Assignment>> {
    let vars = ineq.variables();
    if vars.len() > max_vars {
        return Err(Error::BoundExceeded(format!(
            "{} variables, at most {max_vars} are enumerated",
            vars.len()
        )));
    }
    let sort = ineq.lhs.sort()?;
    if !alg.sorts().contains(&Sort::FINITE) || !alg.sorts().contains(&sort) {
        return Ok(None);
    }
    if !matches!(alg.kind(), MonadKind::OmegaUp) && sort != Sort::FINITE {
        return Err(Error::SortMismatch("`^inf` needs an omega algebra".into()));
    }
    let domain = alg.elements_of(Sort::FINITE);
    if domain.is_empty() {
        return Ok(None);
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        let beta: Assignment = vars.iter().cloned().zip(idx.iter().map(|&i| domain[i])).collect();
        let l = eval_term(alg, &beta, &ineq.lhs)?;
        let r = eval_term(alg, &beta, &ineq.rhs)?;
        if !alg.carrier().leq(l, r) {
            return Ok(Some(beta));
        }
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domain.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Whether every inequality holds; the first failure otherwise.
pub fn satisfies_all(alg: &FinAlgebra, set: &[Inequality]) -> Result<Option<(Inequality, Assignment)>> {
    for ineq in set {
        if let Some(beta) = satisfies(alg, ineq)? {
            return Ok(Some((ineq.clone(), beta)));
        }
    }
    Ok(None)
}

/// `Mod(Φ)` restricted to the given algebras.
pub fn mod_filter<'a>(algs: &[&'a FinAlgebra], phi: &[Inequality]) -> Result<Vec<&'a FinAlgebra>> {
    let mut out = Vec::new();
    for &a in algs {
        if satisfies_all(a, phi)?.is_none() {
            out.push(a);
        }
    }
    Ok(out)
}

/// Named inequality sets, in serialised form.
pub const LIBRARY: &[(&str, &str)] = &[
    ("aperiodic", "x^w x <= x^w\nx^w <= x^w x\n"),
    ("commutative", "x y <= y x\ny x <= x y\n"),
    ("idempotent", "x x <= x\nx <= x x\n"),
];

/// A library set by (case-insensitive) name.
pub fn library(name: &str) -> Option<Vec<Inequality>> {
    LIBRARY
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, text)| Inequality::parse_set(text).expect("library sets parse"))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::tests::cyclic;
    use crate::automata::Dfa;
    use crate::order::SortedOrderedSet;
    use crate::syntactic::syntactic_algebra;

    fn one(ineq: &str) -> Inequality {
        let mut v = Inequality::parse(ineq).unwrap();
        assert_eq!(v.len(), 1);
        v.pop().unwrap()
    }

    fn aa_syn() -> FinAlgebra {
        let rec = Dfa::from_regex("(a|b)*aa(a|b)*").unwrap().to_recognizer().unwrap();
        syntactic_algebra(&rec).unwrap().algebra.as_ref().clone()
    }

    #[test]
    fn parsing_and_display() {
        let t = OmegaTerm::parse("x^w x").unwrap();
        assert_eq!(
            t,
            OmegaTerm::Concat(vec![OmegaTerm::OmegaPow(Box::new(OmegaTerm::var("x"))), OmegaTerm::var("x")])
        );
        assert_eq!(OmegaTerm::parse("xy").unwrap().to_string(), "x y");
        assert_eq!(OmegaTerm::parse("(x y)^w z1").unwrap().to_string(), "(x y)^w z1");
        assert_eq!(OmegaTerm::parse("x (y z)^inf").unwrap().sort().unwrap(), Sort::INFINITE);
        assert!(OmegaTerm::parse("x^inf y").unwrap().sort().is_err());
        assert_eq!(Inequality::parse("x^w x = x^w").unwrap().len(), 2);
        assert!(matches!(Inequality::parse("x < y"), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(OmegaTerm::parse("(x"), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(OmegaTerm::parse("x^v"), Err(Error::Parse { column: 3, .. })));
    }

    #[test]
    fn library_round_trips() {
        for (name, text) in LIBRARY {
            assert_eq!(format_set(&library(name).unwrap()), *text);
        }
        assert!(library("APERIODIC").is_some());
        assert!(library("nilpotent").is_none());
    }

    #[test]
    fn omega_power_examples() {
        let z3 = cyclic(3);
        assert_eq!(omega_power(&z3, 1).unwrap(), 0);
        assert_eq!(omega_power(&z3, 0).unwrap(), 0);
        let syn = aa_syn();
        let a = syn.carrier().lookup("a").unwrap();
        let aa = syn.carrier().lookup("aa").unwrap();
        assert_eq!(omega_power(&syn, a).unwrap(), aa);
        for e in syn.carrier().elements() {
            let p = omega_power(&syn, e).unwrap();
            assert_eq!(syn.dot(p, p), p);
        }
    }

    #[test]
    fn satisfaction_examples() {
        let trivial = FinAlgebra::new(
            MonadKind::Word,
            Arc::new(SortedOrderedSet::discrete(Sort::FINITE, ["1"]).unwrap()),
            |_, _| 0,
        )
        .unwrap();
        let z2 = cyclic(2);
        let syn = aa_syn();
        let ap = one("x^w x <= x^w");
        assert!(satisfies(&trivial, &ap).unwrap().is_none());
        let cex = satisfies(&z2, &ap).unwrap().unwrap();
        assert_eq!(cex, Assignment::from([("x".to_owned(), 1)]));
        for ineq in library("aperiodic").unwrap() {
            assert!(satisfies(&syn, &ineq).unwrap().is_none());
        }
        let comm = library("commutative").unwrap();
        assert!(satisfies_all(&syn, &comm).unwrap().is_some());

        // left-zero semigroup: xy = x
        let lz = FinAlgebra::new(
            MonadKind::Word,
            Arc::new(SortedOrderedSet::discrete(Sort::FINITE, ["p", "q"]).unwrap()),
            |_, x| x[0],
        )
        .unwrap();
        assert!(satisfies_all(&lz, &library("idempotent").unwrap()).unwrap().is_none());
        assert!(satisfies_all(&z2, &library("idempotent").unwrap()).unwrap().is_some());
    }

    #[test]
    fn mod_filter_examples() {
        let z2 = cyclic(2);
        let syn = aa_syn();
        let algs = [&z2, &syn];
        assert_eq!(mod_filter(&algs, &[]).unwrap().len(), 2);
        let kept = mod_filter(&algs, &library("aperiodic").unwrap()).unwrap();
        assert_eq!(kept.len(), 1);
        assert!(std::ptr::eq(kept[0], &syn));
        assert_eq!(mod_filter(&algs, &[one("x <= x")]).unwrap().len(), 2);
    }

    #[test]
    fn variable_bound() {
        let z2 = cyclic(2);
        let many = one("x y z u v <= v u z y x");
        assert!(matches!(satisfies(&z2, &many), Err(Error::BoundExceeded(_))));
        assert!(satisfies_with(&z2, &many, 5).unwrap().is_none());
    }
}
