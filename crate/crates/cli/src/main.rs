use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use emalg::algebra::{format_algebra, parse_algebra};
use emalg::logic::{fo_definable_with, rank_conflict, theory_algebra, RANK_BOUND};
use emalg::profinite::{library, satisfies_all, Inequality};
use emalg::suite;
use emalg::syntactic::{decompose_as_derivatives, syntactic_algebra};
use emalg::varieties::canonical_cover;
use emalg::{Alphabet, Dfa, Error, FinAlgebra, FreeElement, Regex, Sort};

#[derive(Parser)]
#[command(name = "emalg", version, about = "Decision procedures for recognisable languages and finite algebras")]
struct Cli {
    /// Record wall-clock time in the report (reports are otherwise byte-stable).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Syntactic algebra of a language, with its product table.
    Syn {
        /// A regular expression or a DFA file.
        lang: String,
        /// Letters of the alphabet; defaults to the letters of the expression.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Decide a property of a language.
    Decide {
        #[command(subcommand)]
        property: Property,
    },
    /// Check an algebra file against an inequality or a library set.
    Check {
        algebra: PathBuf,
        /// `s <= t`, `s = t`, several lines of those, or a library name.
        inequalities: String,
    },
    /// Write `syn⁻¹[Q]` as a union of intersections of derivatives.
    Decompose {
        lang: String,
        /// Syntactic elements, separated by commas or spaces.
        #[arg(long)]
        target: String,
        #[arg(long)]
        alphabet: Option<String>,
        /// Verify the decomposition on all words up to this length.
        #[arg(long, default_value_t = 6)]
        verify: usize,
    },
    /// Theory algebra of rank `m` over an alphabet.
    Theory {
        m: usize,
        /// Letters, e.g. `ab` or `a,b`.
        alphabet: String,
    },
    /// Canonical cover of an algebra file.
    Cover {
        algebra: PathBuf,
        /// Sorts whose elements serve as letters; defaults to all sorts.
        #[arg(long, value_delimiter = ',')]
        sorts: Vec<String>,
    },
    /// Run the invariant suite.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only the named checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Property {
    /// First-order definability, by aperiodicity and by a rank sweep.
    Fo {
        lang: String,
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long, default_value_t = RANK_BOUND)]
        bound: usize,
    },
}

#[derive(Serialize)]
struct Report {
    command: Vec<String>,
    verdict: String,
    evidence: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    timing: Option<Timing>,
}

#[derive(Serialize)]
struct Timing {
    elapsed_ms: u128,
}

/// Verdict, exit code and evidence of a finished command.
struct Outcome {
    verdict: &'static str,
    code: u8,
    evidence: Value,
}

impl Outcome {
    fn ok(verdict: &'static str, evidence: Value) -> Self {
        Outcome { verdict, code: 0, evidence }
    }

    fn negative(verdict: &'static str, evidence: Value) -> Self {
        Outcome { verdict, code: 1, evidence }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut warnings = Vec::new();
    let outcome = run(&cli.command, &mut warnings).unwrap_or_else(|e| {
        let (verdict, code) = match e {
            Error::BoundExceeded(_) => ("bound-exceeded", 3),
            _ => ("error", 2),
        };
        Outcome {
            verdict,
            code,
            evidence: json!({ "message": e.to_string() }),
        }
    });
    let report = Report {
        command: std::env::args().skip(1).filter(|a| a != "--timing").collect(),
        verdict: outcome.verdict.to_owned(),
        evidence: outcome.evidence,
        warnings,
        timing: cli.timing.then(|| Timing {
            elapsed_ms: start.elapsed().as_millis(),
        }),
    };
    let text = serde_json::to_string_pretty(&report).expect("reports serialise");
    // a closed pipe is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(outcome.code)
}

fn run(command: &Command, warnings: &mut Vec<String>) -> Result<Outcome, Error> {
    match command {
        Command::Syn { lang, alphabet } => syn(&load_language(lang, alphabet.as_deref(), warnings)?),
        Command::Decide {
            property: Property::Fo { lang, alphabet, bound },
        } => decide_fo(&load_language(lang, alphabet.as_deref(), warnings)?, *bound, warnings),
        Command::Check { algebra, inequalities } => check(&load_algebra(algebra)?, inequalities),
        Command::Decompose {
            lang,
            target,
            alphabet,
            verify,
        } => decompose(&load_language(lang, alphabet.as_deref(), warnings)?, target, *verify),
        Command::Theory { m, alphabet } => theory(*m, &parse_letters(alphabet)?),
        Command::Cover { algebra, sorts } => cover(&load_algebra(algebra)?, sorts),
        Command::Laws { seed, only } => laws(*seed, only),
    }
}

fn parse_letters(text: &str) -> Result<Alphabet, Error> {
    let letters: Vec<String> = if text.contains(',') || text.contains(' ') {
        text.split([',', ' ']).filter(|s| !s.is_empty()).map(str::to_owned).collect()
    } else {
        text.chars().map(String::from).collect()
    };
    if letters.is_empty() {
        return Err(Error::Invalid("the alphabet is empty".into()));
    }
    Alphabet::letters(letters)
}

/// A DFA file when `spec` names a file, otherwise a regular expression.
fn load_language(spec: &str, alphabet: Option<&str>, warnings: &mut Vec<String>) -> Result<Dfa, Error> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Invalid(format!("{spec}: {e}")))?;
        return Dfa::parse(&text);
    }
    let re = Regex::parse(spec)?;
    if re.matches_empty() {
        warnings.push("the expression matches the empty word, which is dropped: languages contain nonempty words only".into());
    }
    let sigma = match alphabet {
        Some(a) => parse_letters(a)?,
        None => Alphabet::letters(re.letters().into_iter().map(String::from))?,
    };
    re.to_dfa(&sigma)
}

fn load_algebra(path: &Path) -> Result<FinAlgebra, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    parse_algebra(&text)
}

fn names(alg: &FinAlgebra, xs: impl IntoIterator<Item = usize>) -> Vec<String> {
    xs.into_iter().map(|x| alg.name(x).to_owned()).collect()
}

fn syn(dfa: &Dfa) -> Result<Outcome, Error> {
    let rec = dfa.to_recognizer()?;
    let syn = syntactic_algebra(&rec)?;
    let alg = &syn.algebra;
    let letters: Map<String, Value> = syn
        .alphabet()
        .names()
        .iter()
        .zip(&syn.beta)
        .map(|(l, &e)| (l.clone(), Value::from(alg.name(e))))
        .collect();
    let aperiodic = satisfies_all(alg, &library("aperiodic").expect("library set"))?.is_none();
    Ok(Outcome::ok(
        "ok",
        json!({
            "dfa_states": dfa.live_states(),
            "size": alg.len(),
            "elements": names(alg, alg.carrier().elements()),
            "accepting": names(alg, syn.accepting.iter().copied()),
            "letters": letters,
            "aperiodic": aperiodic,
            "table": format_algebra(alg),
        }),
    ))
}

fn decide_fo(dfa: &Dfa, bound: usize, warnings: &mut Vec<String>) -> Result<Outcome, Error> {
    let v = fo_definable_with(dfa, bound)?;
    let aperiodicity = match &v.counterexample {
        None => json!({ "holds": true }),
        Some((ineq, beta)) => json!({
            "holds": false,
            "violated": ineq.to_string(),
            "assignment": beta.iter().map(|(x, e)| (x.clone(), Value::from(e.as_str()))).collect::<Map<_, _>>(),
        }),
    };
    let mut sweep = json!({
        "least_rank": v.rank,
        "bound": v.bound,
        "decided_up_to": v.decided_up_to,
    });
    if let (None, Some(m)) = (v.rank, v.decided_up_to) {
        if let Some((inside, outside)) = rank_conflict(&dfa.minimize().to_recognizer()?, m)? {
            sweep["conflict"] = json!({
                "rank": m,
                "inside": dfa.show_word(&inside),
                "outside": dfa.show_word(&outside),
            });
        }
    }
    if v.rank.is_none() && v.decided_up_to < Some(bound) {
        warnings.push(format!(
            "ranks above {} exceed the search caps and were not decided",
            v.decided_up_to.map_or("-".into(), |m| m.to_string())
        ));
    }
    if v.inconclusive_rank {
        warnings.push("aperiodic, but no rank up to the decided bound recognises the language".into());
    }
    let evidence = json!({
        "syntactic_size": v.syntactic_size,
        "aperiodicity": aperiodicity,
        "rank_sweep": sweep,
    });
    Ok(if v.definable {
        Outcome::ok("definable", evidence)
    } else {
        Outcome::negative("not-definable", evidence)
    })
}

fn check(alg: &FinAlgebra, text: &str) -> Result<Outcome, Error> {
    let set = match library(text.trim()) {
        Some(set) => set,
        None => Inequality::parse_set(text)?,
    };
    let shown: Vec<String> = set.iter().map(ToString::to_string).collect();
    Ok(match satisfies_all(alg, &set)? {
        None => Outcome::ok("satisfied", json!({ "inequalities": shown, "size": alg.len() })),
        Some((ineq, beta)) => Outcome::negative(
            "violated",
            json!({
                "inequalities": shown,
                "size": alg.len(),
                "failed": ineq.to_string(),
                "assignment": beta.iter().map(|(x, &e)| (x.clone(), Value::from(alg.name(e)))).collect::<Map<_, _>>(),
            }),
        ),
    })
}

fn decompose(dfa: &Dfa, target: &str, verify: usize) -> Result<Outcome, Error> {
    let syn = syntactic_algebra(&dfa.to_recognizer()?)?;
    let alg = &syn.algebra;
    let q = target
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|n| {
            alg.carrier()
                .lookup(n)
                .ok_or_else(|| Error::Invalid(format!("`{n}` is not an element of the syntactic algebra")))
        })
        .collect::<Result<_, _>>()?;
    let d = decompose_as_derivatives(&syn, &q, &[])?;
    let mut checked = 0;
    let mut mismatch = None;
    for w in suite::words(syn.alphabet().len(), verify) {
        let w = FreeElement::Word(w);
        checked += 1;
        if q.contains(&syn.syn(&w)?) != d.contains(&syn.recognizer, &w)? {
            mismatch = Some(syn.alphabet().show(&w));
            break;
        }
    }
    let name_of = |l: &usize| syn.alphabet().name(*l).to_owned();
    let clauses: Vec<Value> = d
        .clauses
        .iter()
        .map(|c| {
            json!({
                "element": alg.name(c.element),
                "contexts": c.contexts.iter().map(|(b, p)| json!({
                    "separates_from": alg.name(*b),
                    "context": p.map(name_of).to_string(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let evidence = json!({
        "target": names(alg, q.iter().copied()),
        "elements": names(alg, alg.carrier().elements()),
        "decomposition": d.show(&syn),
        "clauses": clauses,
        "verified_words": checked,
        "mismatch": mismatch,
    });
    Ok(match mismatch {
        None => Outcome::ok("ok", evidence),
        Some(_) => Outcome::negative("mismatch", evidence),
    })
}

fn theory(m: usize, sigma: &Alphabet) -> Result<Outcome, Error> {
    let th = theory_algebra(sigma, m)?;
    let alg = &th.algebra;
    let letters: Map<String, Value> = sigma
        .names()
        .iter()
        .zip(&th.letters)
        .map(|(l, &e)| (l.clone(), Value::from(alg.name(e))))
        .collect();
    Ok(Outcome::ok(
        "ok",
        json!({
            "rank": m,
            "classes": alg.len(),
            "letters": letters,
            "table": format_algebra(alg),
        }),
    ))
}

fn cover(alg: &FinAlgebra, sorts: &[String]) -> Result<Outcome, Error> {
    let alg = std::sync::Arc::new(alg.clone());
    let delta = if sorts.is_empty() {
        alg.sorts().to_vec()
    } else {
        sorts.iter().map(|s| s.parse::<Sort>()).collect::<Result<Vec<_>, _>>()?
    };
    let c = canonical_cover(&alg, &delta)?;
    let b = &c.cover;
    let mu: Map<String, Value> = b
        .carrier()
        .elements()
        .map(|e| (b.name(e).to_owned(), Value::from(alg.name(c.mu.apply(e)))))
        .collect();
    let languages: Vec<Value> = c
        .languages
        .iter()
        .map(|(a, s)| json!({ "element": alg.name(*a), "syntactic_size": s.algebra.len() }))
        .collect();
    Ok(Outcome::ok(
        "ok",
        json!({
            "size": b.len(),
            "surjective": c.mu.is_surjective(),
            "languages": languages,
            "mu": mu,
            "table": format_algebra(b),
        }),
    ))
}

fn laws(seed: u64, only: &[String]) -> Result<Outcome, Error> {
    let names = if only.is_empty() {
        suite::check_names()
    } else {
        let known = suite::check_names();
        only.iter()
            .map(|n| {
                known.iter().copied().find(|k| k == n).ok_or_else(|| {
                    Error::Invalid(format!("unknown check `{n}`; known: {}", known.join(", ")))
                })
            })
            .collect::<Result<_, _>>()?
    };
    let checks: Vec<suite::Check> = names.iter().filter_map(|n| suite::run(n, seed)).collect();
    let all = checks.iter().all(|c| c.passed);
    let evidence = json!({
        "seed": seed,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "checked": c.checked,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    });
    Ok(if all {
        Outcome::ok("ok", evidence)
    } else {
        Outcome::negative("violated", evidence)
    })
}
