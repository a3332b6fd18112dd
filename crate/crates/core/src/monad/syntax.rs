//! Text form of free elements and contexts.
//!
//! ```text
//! word    [a,b,a]
//! omega   [a]([b,a])^w      prefix · period^ω, the prefix may be []
//!         [a,b]@e           finite prefix followed by a sort-inf label e
//! tree    b(c,x0)           x0, x1, ... are variable leaves
//! ```
//!
//! Patterns additionally accept `_` for the hole of a context.

use std::fmt;

use super::{lasso, FreeElement, MonadKind, Tree, UpWord};
use crate::error::{Error, Result};

/// A label of a context: an ordinary label or the hole.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot<L> {
    Label(L),
    Hole,
}

impl<L: fmt::Display> fmt::Display for Slot<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Label(l) => l.fmt(f),
            Slot::Hole => f.write_str("_"),
        }
    }
}

/// Parses a free element; `_` is rejected.
pub fn parse_element(kind: MonadKind, text: &str) -> Result<FreeElement<String>> {
    let pattern = parse_pattern(kind, text)?;
    pattern.try_map(|s| match s {
        Slot::Label(l) => Ok(l.clone()),
        Slot::Hole => Err(Error::parse(1, 1, "`_` is only allowed in contexts")),
    })
}

/// Parses a free element whose labels may include the hole `_`.
pub fn parse_pattern(kind: MonadKind, text: &str) -> Result<FreeElement<Slot<String>>> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let out = match kind {
        MonadKind::Word => FreeElement::Word(p.nonempty_list()?),
        MonadKind::OmegaUp => FreeElement::Up(p.upword()?),
        MonadKind::Tree { .. } => {
            let mut next = 0;
            let t = p.tree(&mut next)?;
            if matches!(t, Tree::Var(_)) {
                return Err(p.error("a tree must start with a label"));
            }
            FreeElement::Tree(t)
        }
    };
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(1, self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn token(&mut self) -> Result<Slot<String>> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
        {
            self.pos += 1;
        }
        match &self.src[start..self.pos] {
            [] => Err(self.error("expected a label")),
            b"_" => Ok(Slot::Hole),
            t => Ok(Slot::Label(String::from_utf8_lossy(t).into_owned())),
        }
    }

    /// `[l, ...]`, possibly empty.
    fn list(&mut self) -> Result<Vec<Slot<String>>> {
        self.expect(b'[')?;
        let mut out = Vec::new();
        if self.eat(b']') {
            return Ok(out);
        }
        loop {
            out.push(self.token()?);
            if self.eat(b']') {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    fn nonempty_list(&mut self) -> Result<Vec<Slot<String>>> {
        let at = self.pos;
        let out = self.list()?;
        if out.is_empty() {
            self.pos = at;
            return Err(self.error("empty word"));
        }
        Ok(out)
    }

    fn upword(&mut self) -> Result<UpWord<Slot<String>>> {
        let at = self.pos;
        let prefix = self.list()?;
        if self.eat(b'(') {
            let period = self.nonempty_list()?;
            self.expect(b')')?;
            self.expect(b'^')?;
            if !self.eat(b'w') {
                return Err(self.error("expected `w` after `^`"));
            }
            Ok(lasso(prefix, period))
        } else if self.eat(b'@') {
            let last = self.token()?;
            Ok(UpWord::Capped { prefix, last })
        } else if prefix.is_empty() {
            self.pos = at;
            Err(self.error("empty word"))
        } else {
            Ok(UpWord::Finite(prefix))
        }
    }

    fn tree(&mut self, next: &mut usize) -> Result<Tree<Slot<String>>> {
        let at = self.pos;
        let label = self.token()?;
        if let Slot::Label(name) = &label {
            if let Some(i) = variable_index(name) {
                if i != *next {
                    self.pos = at;
                    return Err(self.error(format!("expected variable x{next}, found x{i}")));
                }
                *next += 1;
                return Ok(Tree::Var(i));
            }
        }
        let mut children = Vec::new();
        if self.eat(b'(') {
            loop {
                children.push(self.tree(next)?);
                if self.eat(b')') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        Ok(Tree::Node(label, children))
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn write_list<L: fmt::Display>(f: &mut fmt::Formatter<'_>, w: &[L]) -> fmt::Result {
    f.write_str("[")?;
    for (i, l) in w.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{l}")?;
    }
    f.write_str("]")
}

impl<L: fmt::Display> fmt::Display for Tree<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Var(i) => write!(f, "x{i}"),
            Tree::Node(l, children) => {
                write!(f, "{l}")?;
                if !children.is_empty() {
                    f.write_str("(")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{c}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl<L: fmt::Display> fmt::Display for FreeElement<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeElement::Word(w) | FreeElement::Up(UpWord::Finite(w)) => write_list(f, w),
            FreeElement::Up(UpWord::Lasso { prefix, period }) => {
                write_list(f, prefix)?;
                f.write_str("(")?;
                write_list(f, period)?;
                f.write_str(")^w")
            }
            FreeElement::Up(UpWord::Capped { prefix, last }) => {
                write_list(f, prefix)?;
                write!(f, "@{last}")
            }
            FreeElement::Tree(t) => write!(f, "{t}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREE: MonadKind = MonadKind::Tree { max_arity: 3 };

    fn roundtrip(kind: MonadKind, text: &str) {
        let parsed = parse_pattern(kind, text).unwrap();
        assert_eq!(parsed.to_string(), text);
    }

    #[test]
    fn literals_round_trip() {
        roundtrip(MonadKind::Word, "[a,b,a]");
        roundtrip(MonadKind::OmegaUp, "[b]([b,a])^w");
        roundtrip(MonadKind::OmegaUp, "[]([a,b])^w");
        roundtrip(MonadKind::OmegaUp, "[a,b]@e");
        roundtrip(MonadKind::OmegaUp, "[a,b]");
        roundtrip(TREE, "b(c,x0)");
        roundtrip(TREE, "c");
        roundtrip(MonadKind::Word, "[b,_,a]");
        roundtrip(TREE, "b(_,c)");
        roundtrip(MonadKind::OmegaUp, "[a]([b,_])^w");
    }

    #[test]
    fn upwords_are_normalised_on_parse() {
        let e = parse_element(MonadKind::OmegaUp, "[a,b]([a,b,a,b])^w").unwrap();
        assert_eq!(e.to_string(), "[]([a,b])^w");
    }

    #[test]
    fn whitespace_is_ignored() {
        let e = parse_element(MonadKind::Word, " [ a , b ] ").unwrap();
        assert_eq!(e.to_string(), "[a,b]");
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_element(MonadKind::Word, "[a,,b]").unwrap_err();
        assert!(matches!(err, Error::Parse { column: 4, .. }), "{err:?}");
        assert!(parse_element(MonadKind::Word, "[]").is_err());
        assert!(parse_element(MonadKind::Word, "[a]x").is_err());
        assert!(parse_element(MonadKind::Word, "[_]").is_err());
        assert!(parse_element(TREE, "b(x1,x0)").is_err());
        assert!(parse_element(TREE, "x0").is_err());
        assert!(parse_element(MonadKind::OmegaUp, "[a]([])^w").is_err());
    }
}
