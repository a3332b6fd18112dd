//! Sample languages and algebras shipped with the crate. The algebra texts
//! are the files under `data/algebras`.

use std::sync::Arc;

use crate::algebra::{parse_algebra, Alphabet, FinAlgebra};
use crate::automata::Dfa;
use crate::error::Result;

/// Regression languages: name, regular expression, alphabet letters.
pub const LANGUAGES: &[(&str, &str, &str)] = &[
    ("contains-aa", "(a|b)*aa(a|b)*", "ab"),
    ("ends-ab", "(a|b)*ab", "ab"),
    ("b-then-a", "b*a*", "ab"),
    ("all", "(a|b)+", "ab"),
    ("starts-a", "a(a|b)*", "ab"),
    ("some-a", "(a|b)*a(a|b)*", "ab"),
    ("only-a", "a+", "ab"),
    ("alternating", "(ab)+", "ab"),
    ("even-length", "((a|b)(a|b))+", "ab"),
    ("even-a", "(b|ab*a)+", "ab"),
    ("even-unary", "(aa)+", "a"),
    ("triple-unary", "(aaa)+", "a"),
];

pub const ALGEBRAS: &[(&str, &str)] = &[
    ("trivial", include_str!("../data/algebras/trivial.alg")),
    ("z2", include_str!("../data/algebras/z2.alg")),
    ("z3", include_str!("../data/algebras/z3.alg")),
    ("semilattice", include_str!("../data/algebras/semilattice.alg")),
    ("left_zero", include_str!("../data/algebras/left_zero.alg")),
    ("contains_aa", include_str!("../data/algebras/contains_aa.alg")),
    ("finitely_many_a", include_str!("../data/algebras/finitely_many_a.alg")),
    ("first_letter", include_str!("../data/algebras/first_letter.alg")),
    ("parity_prefix", include_str!("../data/algebras/parity_prefix.alg")),
    ("tree_parity", include_str!("../data/algebras/tree_parity.alg")),
];

/// The minimal DFA of a corpus language.
pub fn language(name: &str) -> Option<Result<Dfa>> {
    LANGUAGES.iter().find(|l| l.0 == name).map(|&(_, re, letters)| language_dfa(re, letters))
}

pub fn language_dfa(regex: &str, letters: &str) -> Result<Dfa> {
    let sigma = Alphabet::letters(letters.chars().map(String::from))?;
    Dfa::from_regex_over(regex, &sigma)
}

pub fn languages() -> Result<Vec<(&'static str, Dfa)>> {
    LANGUAGES.iter().map(|&(n, re, l)| Ok((n, language_dfa(re, l)?))).collect()
}

pub fn algebra(name: &str) -> Option<Arc<FinAlgebra>> {
    ALGEBRAS
        .iter()
        .find(|a| a.0 == name)
        .map(|a| Arc::new(parse_algebra(a.1).expect("shipped algebras parse")))
}

pub fn algebras() -> Vec<(&'static str, Arc<FinAlgebra>)> {
    ALGEBRAS
        .iter()
        .map(|&(n, text)| (n, Arc::new(parse_algebra(text).expect("shipped algebras parse"))))
        .collect()
}
