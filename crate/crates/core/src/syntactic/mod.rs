//! Contexts, saturated context functions, syntactic preorders and syntactic
//! algebras.

mod context;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

pub use context::{context_apply, context_compose, Context};

use crate::algebra::{close, op_shape, quotient_algebra, Alphabet, FinAlgebra, Morphism, Recognizer};
use crate::error::{Error, Result};
use crate::monad::{sing, FreeElement, MonadKind, Slot};
use crate::order::{factor_through, is_upward_closed, Elem, ElemSet, Preorder, Sort, SortedFunction, SortedOrderedSet};

/// Default cap on the number of context functions per source sort.
pub const SATURATION_CAP: usize = 1 << 20;

/// A tabulated map `a ↦ p[a]` from sort `source` to sort `target`, with a
/// shortest context `p` realising it. Context labels are carrier elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextFunction {
    pub source: Sort,
    pub target: Sort,
    /// Indexed by the local index of the argument within its sort.
    pub table: Vec<Elem>,
    pub witness: Context<Elem>,
}

impl ContextFunction {
    pub fn apply(&self, alg: &FinAlgebra, a: Elem) -> Elem {
        self.table[alg.carrier().local_index(a)]
    }
}

/// The one-step contexts: one product with a hole in one argument and
/// constants elsewhere, sorted by their text.
pub fn elementary_contexts(alg: &FinAlgebra) -> Vec<ContextFunction> {
    let mut out = Vec::new();
    for (o, op) in alg.ops().iter().enumerate() {
        let args = op.args();
        for hole in 0..args.len() {
            let others: Vec<&[Elem]> = args
                .iter()
                .enumerate()
                .map(|(i, &s)| if i == hole { &[][..] } else { alg.elements_of(s) })
                .collect();
            if others.iter().enumerate().any(|(i, xs)| i != hole && xs.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; args.len()];
            loop {
                let consts: Vec<Option<Elem>> = (0..args.len())
                    .map(|i| if i == hole { None } else { Some(others[i][idx[i]]) })
                    .collect();
                let shape: Vec<Slot<Elem>> = consts.iter().map(|c| c.map_or(Slot::Hole, Slot::Label)).collect();
                let body = op_shape(alg.kind(), op.symbol(), shape);
                let witness = Context::new(body).expect("one hole");
                let table = alg
                    .elements_of(args[hole])
                    .iter()
                    .map(|&a| {
                        let full: Vec<Elem> = consts.iter().map(|c| c.unwrap_or(a)).collect();
                        alg.apply(o, &full)
                    })
                    .collect();
                out.push(ContextFunction {
                    source: args[hole],
                    target: op.result(),
                    table,
                    witness,
                });
                // odometer over the constant positions
                let mut pos = args.len();
                let mut done = true;
                while pos > 0 {
                    pos -= 1;
                    if pos == hole {
                        continue;
                    }
                    idx[pos] += 1;
                    if idx[pos] < others[pos].len() {
                        done = false;
                        break;
                    }
                    idx[pos] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    let key = |f: &ContextFunction| {
        let s = f.witness.map(|&e| alg.name(e).to_owned()).to_string();
        (s.len(), s)
    };
    out.sort_by_cached_key(key);
    out
}

/// Every context function out of sort `source`, breadth first from the
/// identity: shortest witnesses come first.
pub fn saturate_from(alg: &FinAlgebra, source: Sort, cap: usize) -> Result<Vec<ContextFunction>> {
    if !alg.sorts().contains(&source) {
        return Err(Error::SortMismatch(format!("no sort {source} in the algebra")));
    }
    let elementary = elementary_contexts(alg);
    let id = ContextFunction {
        source,
        target: source,
        table: alg.elements_of(source).to_vec(),
        witness: Context::identity(alg.kind(), source)?,
    };
    let mut seen: HashMap<(Sort, Vec<Elem>), usize> = HashMap::from([((source, id.table.clone()), 0)]);
    let mut out = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let at = out[i].target;
        for e in elementary.iter().filter(|e| e.source == at) {
            let table: Vec<Elem> = out[i].table.iter().map(|&x| e.apply(alg, x)).collect();
            let key = (e.target, table);
            if seen.contains_key(&key) {
                continue;
            }
            if out.len() >= cap {
                return Err(Error::BoundExceeded(format!("more than {cap} context functions from sort {source}")));
            }
            let witness = e.witness.compose(&out[i].witness)?;
            seen.insert(key.clone(), out.len());
            queue.push_back(out.len());
            out.push(ContextFunction {
                source,
                target: key.0,
                table: key.1,
                witness,
            });
        }
    }
    Ok(out)
}

/// The context functions from `source` to `target`.
pub fn saturate_contexts(alg: &FinAlgebra, source: Sort, target: Sort) -> Result<Vec<ContextFunction>> {
    let mut all = saturate_from(alg, source, SATURATION_CAP)?;
    all.retain(|f| f.target == target);
    Ok(all)
}

/// `a ≼ b` iff `p[a] ∈ P` implies `p[b] ∈ P` for every context `p`, where
/// `P` lies in sort `target`. Elements of different sorts are unrelated.
pub fn syntactic_preorder(alg: &FinAlgebra, accepting: &ElemSet, target: Sort) -> Result<Preorder> {
    if !is_upward_closed(alg.carrier(), accepting) {
        return Err(Error::NotUpwardClosed(
            accepting.iter().map(|&e| alg.name(e)).collect::<Vec<_>>().join(", "),
        ));
    }
    if accepting.iter().any(|&p| alg.sort_of(p) != target) {
        return Err(Error::SortMismatch(format!("accepting set is not inside sort {target}")));
    }
    let n = alg.len();
    let mut rel = vec![false; n * n];
    for &zeta in alg.sorts() {
        let funcs = if alg.sorts().contains(&target) {
            saturate_contexts(alg, zeta, target)?
        } else {
            Vec::new()
        };
        let elems = alg.elements_of(zeta);
        let sig: Vec<Vec<bool>> = (0..elems.len())
            .map(|i| funcs.iter().map(|f| accepting.contains(&f.table[i])).collect())
            .collect();
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                rel[a * n + b] = sig[i].iter().zip(&sig[j]).all(|(&x, &y)| !x || y);
            }
        }
    }
    Preorder::from_table(alg.carrier().clone(), rel)
}

/// A recognizer's syntactic algebra and how it was obtained.
#[derive(Clone, Debug)]
pub struct SyntacticResult {
    pub recognizer: Recognizer,
    /// The image subalgebra `⟨rng φ⟩` and its inclusion.
    pub image: Arc<FinAlgebra>,
    pub inclusion: Morphism,
    /// A shortest term for every element of the image.
    pub representatives: Vec<FreeElement<usize>>,
    /// `≼_K` on the image.
    pub preorder: Preorder,
    /// Image to syntactic algebra.
    pub morphism: Morphism,
    pub algebra: Arc<FinAlgebra>,
    pub accepting: ElemSet,
    /// Letter images in the syntactic algebra.
    pub beta: Vec<Elem>,
}

impl SyntacticResult {
    /// `syn_K(t)`.
    pub fn syn(&self, t: &FreeElement<usize>) -> Result<Elem> {
        self.algebra.eval(t, |&l| self.beta[l])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.recognizer.alphabet
    }

    pub fn sort(&self) -> Sort {
        self.recognizer.sort
    }

    /// The syntactic morphism as a recognizer of the same language.
    pub fn as_recognizer(&self) -> Result<Recognizer> {
        Recognizer::new(
            self.alphabet().clone(),
            self.algebra.clone(),
            self.beta.clone(),
            self.accepting.clone(),
            self.sort(),
        )
    }

    /// A shortest term for every syntactic element.
    pub fn class_representatives(&self) -> Vec<FreeElement<usize>> {
        let mut out: Vec<Option<FreeElement<usize>>> = vec![None; self.algebra.len()];
        for (x, t) in self.representatives.iter().enumerate() {
            out[self.morphism.apply(x)].get_or_insert_with(|| t.clone());
        }
        out.into_iter().map(|t| t.expect("quotient map is onto")).collect()
    }
}

/// `Syn(K)` for the language `K` of a recognizer.
pub fn syntactic_algebra(rec: &Recognizer) -> Result<SyntacticResult> {
    let alg = &rec.algebra;
    let gens = rec.beta.iter().enumerate().map(|(l, &e)| (e, rec.alphabet.sort(l))).collect();
    let closure = close(
        alg.kind(),
        alg.sorts(),
        gens,
        |sym, args| {
            let a: Vec<Elem> = args.iter().map(|&&x| x).collect();
            alg.apply_symbol(sym, &a)
        },
        |&x, &y| alg.carrier().leq(x, y),
        |&x, _| alg.name(x).to_owned(),
        usize::MAX,
    )?;
    let labels = (0..rec.alphabet.len())
        .map(|l| sing(rec.kind(), l, rec.alphabet.sort(l)))
        .collect::<Result<Vec<_>>>()?;
    let representatives = closure.witnesses(&labels)?;
    let image = Arc::new(closure.algebra);
    let inclusion = Morphism::new(
        image.clone(),
        alg.clone(),
        closure.keys.clone(),
    )?;
    let accepting_image: ElemSet = (0..image.len())
        .filter(|&x| rec.accepting.contains(&closure.keys[x]))
        .collect();
    let preorder = if image.sorts().contains(&rec.sort) {
        syntactic_preorder(&image, &accepting_image, rec.sort)?
    } else {
        Preorder::total(image.carrier().clone())
    };
    let (algebra, morphism) = quotient_algebra(&image, &preorder)?;
    let accepting = accepting_image.iter().map(|&x| morphism.apply(x)).collect();
    let beta = closure.generators.iter().map(|&x| morphism.apply(x)).collect();
    Ok(SyntacticResult {
        recognizer: rec.clone(),
        image,
        inclusion,
        representatives,
        preorder,
        morphism,
        algebra,
        accepting,
        beta,
    })
}

/// The unique `ρ` with `syn_K = ρ ∘ φ`, for a recognizer of `K` whose
/// morphism `φ` is onto its algebra.
pub fn factor_to_syntactic(rec: &Recognizer, syn: &SyntacticResult) -> Result<Morphism> {
    if rec.alphabet != *syn.alphabet() || rec.sort != syn.sort() {
        return Err(Error::Invalid("recognizer and syntactic algebra use different alphabets".into()));
    }
    let alg = &rec.algebra;
    let gens = rec.beta.iter().enumerate().map(|(l, &e)| (e, rec.alphabet.sort(l))).collect();
    let closure = close(
        alg.kind(),
        alg.sorts(),
        gens,
        |sym, args| {
            let a: Vec<Elem> = args.iter().map(|&&x| x).collect();
            alg.apply_symbol(sym, &a)
        },
        |&x, &y| alg.carrier().leq(x, y),
        |&x, _| alg.name(x).to_owned(),
        usize::MAX,
    )?;
    if closure.keys.len() != alg.len() {
        let missing = alg.carrier().elements().find(|e| !closure.keys.contains(e)).unwrap_or_default();
        return Err(Error::NotSurjective(alg.name(missing).to_owned()));
    }
    let labels = (0..rec.alphabet.len())
        .map(|l| sing(rec.kind(), l, rec.alphabet.sort(l)))
        .collect::<Result<Vec<_>>>()?;
    let terms = closure.witnesses(&labels)?;
    // representatives, discretely ordered, mapped into `alg` and into Syn(K)
    let mut builder = SortedOrderedSet::builder(alg.sorts().iter().copied()).cap(usize::MAX);
    for (i, t) in terms.iter().enumerate() {
        builder.element(format!("t{i}"), t.sort());
    }
    let reps = Arc::new(builder.build()?);
    let phi = SortedFunction::new(reps.clone(), alg.carrier().clone(), closure.keys.clone())?;
    let syn_map = terms.iter().map(|t| syn.syn(t)).collect::<Result<Vec<_>>>()?;
    let g = SortedFunction::new(reps, syn.algebra.carrier().clone(), syn_map)?;
    let rho = factor_through(&phi, &g)?;
    let rho = Morphism::new(alg.clone(), syn.algebra.clone(), rho.table().to_vec())
        .map_err(|e| Error::NoFactorisation { left: "φ".into(), right: e.to_string() })?;
    Ok(rho)
}

/// One disjunct `⋂_b p_b⁻¹[K]` of a decomposition, for syntactic element `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub element: Elem,
    /// `(b, p)` with `p[a] ∈ K` and `p[b] ∉ K`.
    pub contexts: Vec<(Elem, Context<usize>)>,
}

/// `L = ⋃ clauses`, each clause an intersection of context preimages of `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Sort of the decomposed language.
    pub sort: Sort,
    pub clauses: Vec<Clause>,
}

impl Decomposition {
    /// Membership of `t` computed from `K` alone: `t ∈ p⁻¹[K]` iff `p[t] ∈ K`.
    pub fn contains(&self, rec: &Recognizer, t: &FreeElement<usize>) -> Result<bool> {
        if t.sort() != self.sort {
            return Ok(false);
        }
        for clause in &self.clauses {
            let mut all = true;
            for (_, p) in &clause.contexts {
                if !rec.accepts(&p.plug(t)?)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn show(&self, syn: &SyntacticResult) -> String {
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                if c.contexts.is_empty() {
                    return "all".to_owned();
                }
                let parts: Vec<String> = c
                    .contexts
                    .iter()
                    .map(|(_, p)| format!("{}⁻¹K", p.map(|&l| syn.alphabet().name(l).to_owned())))
                    .collect();
                parts.join(" ∩ ")
            })
            .collect();
        if clauses.is_empty() {
            "∅".to_owned()
        } else {
            clauses.join(" ∪ ")
        }
    }
}

/// Writes `L = syn_K⁻¹[Q]` as `⋃_{a∈Q} ⋂_{b∉Q} p_ab⁻¹[K]`. Separating
/// contexts are taken from `preferred` when one works, otherwise the first
/// saturated context function that separates.
pub fn decompose_as_derivatives(
    syn: &SyntacticResult,
    q: &ElemSet,
    preferred: &[Context<usize>],
) -> Result<Decomposition> {
    let alg = &syn.algebra;
    let sort = q.iter().next().map(|&a| alg.sort_of(a)).unwrap_or(syn.sort());
    if q.iter().any(|&a| alg.sort_of(a) != sort) {
        return Err(Error::SortMismatch("target set spans several sorts".into()));
    }
    if !is_upward_closed(alg.carrier(), q) {
        return Err(Error::NotUpwardClosed(alg.carrier().format_set(q)));
    }
    let reps = syn.class_representatives();
    let funcs = if alg.sorts().contains(&syn.sort()) {
        saturate_contexts(alg, sort, syn.sort())?
    } else {
        Vec::new()
    };
    let pref: Vec<(&Context<usize>, Vec<Elem>)> = preferred
        .iter()
        .filter(|p| p.hole_sort() == sort && p.result_sort() == syn.sort())
        .map(|p| {
            let table = alg
                .elements_of(sort)
                .iter()
                .map(|&a| context_apply(alg, p, |&l| syn.beta[l], a))
                .collect::<Result<Vec<_>>>()?;
            Ok((p, table))
        })
        .collect::<Result<_>>()?;
    let local = |e: Elem| alg.carrier().local_index(e);
    let accepts = |e: Elem| syn.accepting.contains(&e);
    let mut clauses = Vec::new();
    for &a in q {
        let mut contexts = Vec::new();
        for &b in alg.elements_of(sort).iter().filter(|b| !q.contains(b)) {
            let separates = |t: &[Elem]| accepts(t[local(a)]) && !accepts(t[local(b)]);
            let p = if let Some((p, _)) = pref.iter().find(|(_, t)| separates(t)) {
                (*p).clone()
            } else {
                let f = funcs.iter().find(|f| separates(&f.table)).ok_or_else(|| {
                    Error::NotRecognised(format!("no context separates `{}` from `{}`", alg.name(a), alg.name(b)))
                })?;
                f.witness.substitute(|&e| reps[e].clone())?
            };
            contexts.push((b, p));
        }
        clauses.push(Clause { element: a, contexts });
    }
    Ok(Decomposition { sort, clauses })
}

/// The elements of `Syn(K)` whose preimage lies in the language of `other`;
/// fails if some syntactic class contains members and non-members.
pub fn recognised_subset(syn: &SyntacticResult, other: &Recognizer) -> Result<ElemSet> {
    if other.alphabet != *syn.alphabet() {
        return Err(Error::Invalid("languages over different alphabets".into()));
    }
    let (a, b) = (&syn.algebra, &other.algebra);
    let gens = (0..other.alphabet.len())
        .map(|l| ((syn.beta[l], other.beta[l]), other.alphabet.sort(l)))
        .collect();
    let pairs = close(
        a.kind(),
        a.sorts(),
        gens,
        |sym, args| {
            let x: Vec<Elem> = args.iter().map(|p| p.0).collect();
            let y: Vec<Elem> = args.iter().map(|p| p.1).collect();
            Ok((a.apply_symbol(sym, &x)?, b.apply_symbol(sym, &y)?))
        },
        |p, q| p == q,
        |_, i| i.to_string(),
        usize::MAX,
    )?;
    let mut verdict: HashMap<Elem, bool> = HashMap::new();
    for &(x, y) in &pairs.keys {
        if a.sort_of(x) != other.sort {
            continue;
        }
        let inside = other.accepting.contains(&y);
        if *verdict.entry(x).or_insert(inside) != inside {
            return Err(Error::NotRecognised(format!(
                "class `{}` contains words inside and outside the language",
                a.name(x)
            )));
        }
    }
    Ok(verdict.into_iter().filter(|&(_, v)| v).map(|(x, _)| x).collect())
}

/// The value of `u v^ω` in a Wilke algebra: `fold(u) · fold(v)^ω`.
pub fn eval_upword<L>(alg: &FinAlgebra, u: &[L], v: &[L], beta: impl Fn(&L) -> Elem) -> Result<Elem> {
    if alg.kind() != MonadKind::OmegaUp {
        return Err(Error::SortMismatch("not an omega algebra".into()));
    }
    let u: Vec<Elem> = u.iter().map(&beta).collect();
    let v: Vec<Elem> = v.iter().map(&beta).collect();
    if u.iter().chain(&v).any(|&e| e >= alg.len() || alg.sort_of(e) != Sort::FINITE) {
        return Err(Error::SortMismatch("labels must map to sort-1 elements".into()));
    }
    let e = alg.omega(alg.fold(&v)?);
    if u.is_empty() {
        Ok(e)
    } else {
        Ok(alg.mix(alg.fold(&u)?, e))
    }
}

/// `u v^ω` as a free element, for cross-checks against [`eval_upword`].
pub fn upword<L: PartialEq + Clone>(u: &[L], v: &[L]) -> FreeElement<L> {
    FreeElement::Up(crate::monad::lasso(u.to_vec(), v.to_vec()))
}
