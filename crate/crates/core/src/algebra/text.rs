//! Line-based algebra files.
//!
//! ```text
//! # the two-element semilattice
//! kind word
//! elems 1 0 1
//! leq 1 0 1
//! dot 0 0 0
//! dot 0 1 0
//! dot 1 0 0
//! dot 1 1 1
//! ```
//!
//! Omega algebras use `mix a e r` and `omega a e`; tree algebras
//! (`kind tree [max-arity]`) use `comp a b1 .. bn r` where `_` leaves a child
//! as a variable. Every table must be total.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{signature, FinAlgebra, Symbol};
use crate::error::{Error, Result};
use crate::monad::{MonadKind, DEFAULT_MAX_ARITY};
use crate::order::{Elem, Sort, SortedOrderedSet};

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_algebra(text: &str) -> Result<FinAlgebra> {
    let mut kind: Option<MonadKind> = None;
    let mut elems: Vec<(String, Sort)> = Vec::new();
    let mut names: HashMap<String, Elem> = HashMap::new();
    let mut order: Vec<(Elem, Elem)> = Vec::new();
    let mut cells: HashMap<(Symbol, Vec<Elem>), (Elem, usize)> = HashMap::new();

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(col, head)) = toks.first() else { continue };
        let err = |col: usize, msg: String| Error::parse(line_no, col, msg);
        let lookup = |(col, name): (usize, &str)| -> Result<Elem> {
            names
                .get(name)
                .copied()
                .ok_or_else(|| err(col, format!("unknown element `{name}`")))
        };
        if head != "kind" && kind.is_none() {
            return Err(err(col, "the first directive must be `kind`".into()));
        }
        match head {
            "kind" => {
                if kind.is_some() {
                    return Err(err(col, "`kind` given twice".into()));
                }
                kind = Some(match toks.get(1).map(|t| t.1) {
                    Some("word") if toks.len() == 2 => MonadKind::Word,
                    Some("omega") if toks.len() == 2 => MonadKind::OmegaUp,
                    Some("tree") if toks.len() <= 3 => {
                        let max_arity = match toks.get(2) {
                            Some(&(c, m)) => m.parse().map_err(|_| err(c, format!("bad max arity `{m}`")))?,
                            None => DEFAULT_MAX_ARITY,
                        };
                        MonadKind::Tree { max_arity }
                    }
                    _ => return Err(err(col, "expected `kind word`, `kind omega` or `kind tree [max]`".into())),
                });
            }
            "elems" => {
                let k = kind.expect("checked above");
                let &(c, s) = toks.get(1).ok_or_else(|| err(col, "missing sort".into()))?;
                let sort: Sort = s.parse().map_err(|_| err(c, format!("bad sort `{s}`")))?;
                if !k.has_sort(sort) {
                    return Err(err(c, format!("sort {sort} does not exist in the {} monad", k.name())));
                }
                for &(c, name) in &toks[2..] {
                    if name == "_" {
                        return Err(err(c, "`_` is reserved".into()));
                    }
                    if names.insert(name.to_owned(), elems.len()).is_some() {
                        return Err(err(c, format!("duplicate element `{name}`")));
                    }
                    elems.push((name.to_owned(), sort));
                }
            }
            "leq" => {
                if toks.len() != 4 {
                    return Err(err(col, "expected `leq <sort> a b`".into()));
                }
                let sort: Sort = toks[1].1.parse().map_err(|_| err(toks[1].0, "bad sort".into()))?;
                let a = lookup(toks[2])?;
                let b = lookup(toks[3])?;
                for (t, e) in [(toks[2], a), (toks[3], b)] {
                    if elems[e].1 != sort {
                        return Err(err(t.0, format!("`{}` is not of sort {sort}", t.1)));
                    }
                }
                order.push((a, b));
            }
            "dot" | "mix" | "omega" | "comp" => {
                let k = kind.expect("checked above");
                let args = &toks[1..];
                let (symbol, operands, result) = match (head, k) {
                    ("dot", MonadKind::Word | MonadKind::OmegaUp) if args.len() == 3 => {
                        (Symbol::Dot, vec![lookup(args[0])?, lookup(args[1])?], lookup(args[2])?)
                    }
                    ("mix", MonadKind::OmegaUp) if args.len() == 3 => {
                        (Symbol::Mix, vec![lookup(args[0])?, lookup(args[1])?], lookup(args[2])?)
                    }
                    ("omega", MonadKind::OmegaUp) if args.len() == 2 => {
                        (Symbol::Omega, vec![lookup(args[0])?], lookup(args[1])?)
                    }
                    ("comp", MonadKind::Tree { .. }) if args.len() >= 3 => {
                        let root = lookup(args[0])?;
                        let mut slots = Vec::new();
                        let mut operands = vec![root];
                        for &t in &args[1..args.len() - 1] {
                            if t.1 == "_" {
                                slots.push(None);
                            } else {
                                let b = lookup(t)?;
                                slots.push(Some(elems[b].1));
                                operands.push(b);
                            }
                        }
                        if slots.len() != elems[root].1.arity() {
                            return Err(err(
                                args[0].0,
                                format!("`{}` has arity {} but {} children are given", args[0].1, elems[root].1, slots.len()),
                            ));
                        }
                        (Symbol::Comp(slots), operands, lookup(args[args.len() - 1])?)
                    }
                    _ => return Err(err(col, format!("malformed or misplaced `{head}` entry"))),
                };
                let (arg_sorts, result_sort) = symbol.typing();
                for (i, (&e, &s)) in operands.iter().zip(&arg_sorts).enumerate() {
                    if elems[e].1 != s {
                        return Err(err(args[i].0, format!("`{}` should have sort {s}", elems[e].0)));
                    }
                }
                if elems[result].1 != result_sort {
                    let c = args[args.len() - 1].0;
                    return Err(err(c, format!("the result should have sort {result_sort}")));
                }
                if let Some(&(prev, at)) = cells.get(&(symbol.clone(), operands.clone())) {
                    if prev != result {
                        return Err(err(col, format!("conflicts with the entry on line {at}")));
                    }
                }
                cells.insert((symbol, operands), (result, line_no));
            }
            other => return Err(err(col, format!("unknown directive `{other}`"))),
        }
    }

    let kind = kind.ok_or_else(|| Error::parse(1, 1, "empty algebra file"))?;
    let mut builder = SortedOrderedSet::builder(kind.sorts()).cap(usize::MAX);
    for (name, sort) in &elems {
        builder.element(name.clone(), *sort);
    }
    for &(a, b) in &order {
        builder.leq(a, b);
    }
    let carrier = Arc::new(builder.build()?);
    for symbol in signature(kind, carrier.sorts()) {
        let (args, _) = symbol.typing();
        let mut idx = vec![0usize; args.len()];
        let lists: Vec<&[Elem]> = args.iter().map(|&s| carrier.elements_of(s)).collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        loop {
            let tuple: Vec<Elem> = idx.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
            if !cells.contains_key(&(symbol.clone(), tuple.clone())) {
                let shown: Vec<&str> = tuple.iter().map(|&e| carrier.name(e)).collect();
                return Err(Error::Invalid(format!(
                    "incomplete table: {symbol}({}) is undefined",
                    shown.join(", ")
                )));
            }
            let mut pos = idx.len();
            while pos > 0 {
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < lists[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    FinAlgebra::new(kind, carrier, |sym, args| cells[&(sym.clone(), args.to_vec())].0)
}

/// Writes an algebra in the file format; [`parse_algebra`] reads it back.
pub fn format_algebra(alg: &FinAlgebra) -> String {
    let carrier = alg.carrier();
    let mut out = String::new();
    let _ = writeln!(out, "kind {}", alg.kind());
    for &s in alg.sorts() {
        let names: Vec<&str> = carrier.elements_of(s).iter().map(|&e| carrier.name(e)).collect();
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(out, "elems {s} {}", names.join(" "));
    }
    let strict = carrier.strict_pairs();
    for &(a, b) in &strict {
        let covered = strict.iter().any(|&(x, y)| x == a && carrier.leq(y, b) && y != b);
        if !covered {
            let _ = writeln!(out, "leq {} {} {}", carrier.sort_of(a), carrier.name(a), carrier.name(b));
        }
    }
    for op in alg.ops() {
        for cell in 0..op.cell_count() {
            let args = op.cell_args(carrier, cell);
            let r = op.table()[cell];
            let mut line = match op.symbol() {
                Symbol::Comp(slots) => {
                    let mut parts = vec![carrier.name(args[0])];
                    let mut rest = args[1..].iter();
                    for s in slots {
                        parts.push(match s {
                            Some(_) => carrier.name(*rest.next().expect("one argument per slot")),
                            None => "_",
                        });
                    }
                    format!("comp {}", parts.join(" "))
                }
                sym => {
                    let parts: Vec<&str> = args.iter().map(|&e| carrier.name(e)).collect();
                    format!("{sym} {}", parts.join(" "))
                }
            };
            let _ = write!(line, " {}", carrier.name(r));
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEMILATTICE: &str = "\
# the two-element semilattice
kind word
elems 1 0 1
leq 1 0 1
dot 0 0 0
dot 0 1 0
dot 1 0 0
dot 1 1 1
";

    #[test]
    fn round_trip() {
        let alg = parse_algebra(SEMILATTICE).unwrap();
        assert_eq!(alg.len(), 2);
        assert!(alg.carrier().leq(0, 1));
        let text = format_algebra(&alg);
        assert_eq!(parse_algebra(&text).unwrap(), alg);
        assert_eq!(text, SEMILATTICE.lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = SEMILATTICE.replace("dot 1 0 0", "dot 1 z 0");
        match parse_algebra(&bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (7, 7)),
            other => panic!("{other:?}"),
        }
        let missing = SEMILATTICE.replace("dot 1 1 1\n", "");
        assert!(matches!(parse_algebra(&missing), Err(Error::Invalid(_))));
        let conflict = format!("{SEMILATTICE}dot 1 1 0\n");
        assert!(matches!(parse_algebra(&conflict), Err(Error::Parse { line: 9, .. })));
        assert!(matches!(parse_algebra("elems 1 a"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn non_monotone_table_is_rejected() {
        let bad = SEMILATTICE.replace("dot 1 1 1", "dot 1 1 0").replace("dot 0 0 0", "dot 0 0 1");
        assert!(matches!(parse_algebra(&bad), Err(Error::LawViolation(_))));
    }

    #[test]
    fn tree_algebra_round_trip() {
        // parity of the number of constant leaves, for every arity up to 2
        let kind = MonadKind::Tree { max_arity: 2 };
        let mut b = SortedOrderedSet::builder(kind.sorts());
        for k in 0..=2u8 {
            for p in 0..2 {
                b.element(format!("p{p}_{k}"), Sort(k));
            }
        }
        let carrier = Arc::new(b.build().unwrap());
        let alg = FinAlgebra::new(kind, carrier.clone(), |sym, args| {
            let (_, result) = sym.typing();
            let parity = args.iter().map(|&e| carrier.local_index(e)).sum::<usize>() % 2;
            carrier.elements_of(result)[parity]
        })
        .unwrap();
        let text = format_algebra(&alg);
        assert!(text.contains("comp p1_2 _ p1_0 p0_1\n"), "{text}");
        assert_eq!(parse_algebra(&text).unwrap(), alg);
        let truncated: String = text.lines().filter(|l| !l.starts_with("comp p1_2 _")).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_algebra(&truncated), Err(Error::Invalid(_))));
    }
}
