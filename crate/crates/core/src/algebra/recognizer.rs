use std::sync::Arc;

use super::FinAlgebra;
use crate::error::{Error, Result};
use crate::monad::{parse_element, FreeElement, MonadKind};
use crate::order::{is_upward_closed, upward_closure, Elem, ElemSet, Sort};

/// A finite, discretely ordered, sorted alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    sorts: Vec<Sort>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = (S, Sort)>) -> Result<Self> {
        let (names, sorts): (Vec<String>, Vec<Sort>) = letters.into_iter().map(|(n, s)| (n.into(), s)).unzip();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        Ok(Alphabet { names, sorts })
    }

    /// Letters of sort `1`.
    pub fn letters<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(names.into_iter().map(|n| (n, Sort::FINITE)))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, letter: usize) -> &str {
        &self.names[letter]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sort(&self, letter: usize) -> Sort {
        self.sorts[letter]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses a literal over this alphabet.
    pub fn parse(&self, kind: MonadKind, text: &str) -> Result<FreeElement<usize>> {
        let t = parse_element(kind, text)?;
        let t = t.try_map(|n| {
            self.lookup(n)
                .ok_or_else(|| Error::parse(1, 1, format!("unknown letter `{n}`")))
        })?;
        t.validate(kind, |&l| self.sorts[l])?;
        Ok(t)
    }

    /// Reads a plain string of one-character letters, e.g. `abba`.
    pub fn word(&self, text: &str) -> Result<FreeElement<usize>> {
        let w = text
            .chars()
            .map(|c| {
                self.lookup(&c.to_string())
                    .ok_or_else(|| Error::Invalid(format!("unknown letter `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if w.is_empty() {
            return Err(Error::Invalid("empty word".into()));
        }
        Ok(FreeElement::Word(w))
    }

    pub fn show(&self, t: &FreeElement<usize>) -> String {
        t.map(|&l| self.names[l].clone()).to_string()
    }
}

/// `K = h⁻¹[P]` for the morphism `h` extending `beta` and an upward closed
/// accepting set `P` of one sort.
#[derive(Clone, Debug)]
pub struct Recognizer {
    pub alphabet: Alphabet,
    pub algebra: Arc<FinAlgebra>,
    pub beta: Vec<Elem>,
    pub accepting: ElemSet,
    pub sort: Sort,
}

impl Recognizer {
    pub fn new(
        alphabet: Alphabet,
        algebra: Arc<FinAlgebra>,
        beta: Vec<Elem>,
        accepting: ElemSet,
        sort: Sort,
    ) -> Result<Self> {
        if beta.len() != alphabet.len() {
            return Err(Error::Invalid("one image per letter is needed".into()));
        }
        for (l, &e) in beta.iter().enumerate() {
            if e >= algebra.len() || algebra.sort_of(e) != alphabet.sort(l) {
                return Err(Error::SortMismatch(format!("letter `{}` is assigned a wrong-sort element", alphabet.name(l))));
            }
        }
        if let Some(&p) = accepting.iter().find(|&&p| algebra.sort_of(p) != sort) {
            return Err(Error::SortMismatch(format!("accepting element `{}` is not of sort {sort}", algebra.name(p))));
        }
        if !is_upward_closed(algebra.carrier(), &accepting) {
            let up = upward_closure(algebra.carrier(), &accepting);
            let missing = up.difference(&accepting).next().copied().unwrap_or_default();
            return Err(Error::NotUpwardClosed(algebra.name(missing).to_owned()));
        }
        Ok(Recognizer {
            alphabet,
            algebra,
            beta,
            accepting,
            sort,
        })
    }

    pub fn kind(&self) -> MonadKind {
        self.algebra.kind()
    }

    pub fn eval(&self, t: &FreeElement<usize>) -> Result<Elem> {
        self.algebra.eval(t, |&l| self.beta[l])
    }

    pub fn accepts(&self, t: &FreeElement<usize>) -> Result<bool> {
        Ok(t.sort() == self.sort && self.accepting.contains(&self.eval(t)?))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::cyclic;
    use super::*;

    #[test]
    fn even_length_words() {
        let sigma = Alphabet::letters(["a", "b"]).unwrap();
        let rec = Recognizer::new(sigma.clone(), Arc::new(cyclic(2)), vec![1, 1], ElemSet::from([0]), Sort::FINITE)
            .unwrap();
        assert!(rec.accepts(&sigma.word("ab").unwrap()).unwrap());
        assert!(!rec.accepts(&sigma.parse(MonadKind::Word, "[a,b,a]").unwrap()).unwrap());
        assert!(sigma.parse(MonadKind::Word, "[a,c]").is_err());
    }
}
