//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any failure.

use std::collections::{BTreeSet, HashMap};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use emalg::logic::theory_algebra;
use emalg::profinite::{library, satisfies_all};
use emalg::suite::{self, words};
use emalg::syntactic::syntactic_algebra;
use emalg::{corpus, Alphabet, FreeElement};

const SEED: u64 = 0;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: impl AsRef<str>) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    }

    fn suite(&mut self, name: &str, check: &str, limit: Option<Duration>) {
        let start = Instant::now();
        let c = suite::run(check, SEED).expect("known check");
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took < l);
        self.line(name, c.passed && in_time, format!("{} instances, {} ({took:.1?})", c.checked, c.detail));
    }
}

/// Transition semigroup of a complete DFA given as `delta[letter][state]`.
fn transition_semigroup(delta: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen: BTreeSet<Vec<usize>> = delta.iter().cloned().collect();
    let mut frontier: Vec<Vec<usize>> = seen.iter().cloned().collect();
    while let Some(f) = frontier.pop() {
        for g in delta {
            let fg: Vec<usize> = f.iter().map(|&q| g[q]).collect();
            if seen.insert(fg.clone()) {
                frontier.push(fg);
            }
        }
    }
    seen.into_iter().collect()
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    f.iter().map(|&q| g[q]).collect()
}

fn idempotent_power(f: &[usize]) -> Vec<usize> {
    let mut p = f.to_vec();
    loop {
        let pp = compose(&p, &p);
        if pp == p {
            return p;
        }
        p = compose(&p, f);
    }
}

fn aperiodic(sg: &[Vec<usize>]) -> bool {
    sg.iter().all(|f| {
        let e = idempotent_power(f);
        compose(&e, f) == e
    })
}

fn syntactic_constants(r: &mut Report) {
    // Minimal DFAs over {a, b} and {a}, with the dead state included.
    let contains_aa = [vec![1, 2, 2], vec![0, 0, 2]];
    let even_unary = [vec![1, 2, 1]];
    let (sa, se) = (transition_semigroup(&contains_aa), transition_semigroup(&even_unary));
    let oracle = sa.len() == 5 && aperiodic(&sa) && se.len() == 2 && !aperiodic(&se);

    let ap = library("aperiodic").unwrap();
    let aa = syntactic_algebra(&corpus::language("contains-aa").unwrap().unwrap().to_recognizer().unwrap()).unwrap();
    let even = syntactic_algebra(&corpus::language("even-unary").unwrap().unwrap().to_recognizer().unwrap()).unwrap();
    let class_a = even.syn(&FreeElement::Word(vec![0])).unwrap();
    let witness = satisfies_all(&even.algebra, &ap).unwrap().map(|(_, beta)| beta.get("x") == Some(&class_a));
    let ok = oracle
        && aa.algebra.len() == sa.len()
        && satisfies_all(&aa.algebra, &ap).unwrap().is_none()
        && even.algebra.len() == se.len()
        && witness == Some(true);
    r.line(
        "syntactic constants",
        ok,
        format!(
            "|Syn(contains-aa)| = {} (oracle {}), |Syn((aa)+)| = {} (oracle {}), witness x = [a]: {witness:?}",
            aa.algebra.len(),
            sa.len(),
            even.algebra.len(),
            se.len()
        ),
    );
}

/// Duplicator wins the `rounds`-round game on `(u, w)` with pebbles placed at `pu`, `pw`.
fn duplicator_wins(u: &[usize], w: &[usize], pu: &mut Vec<usize>, pw: &mut Vec<usize>, rounds: usize) -> bool {
    let n = pu.len();
    if n > 0 {
        let (i, j) = (pu[n - 1], pw[n - 1]);
        if u[i] != w[j] {
            return false;
        }
        for k in 0..n - 1 {
            let (x, y) = (pu[k], pw[k]);
            if (x <= i) != (y <= j) || (i <= x) != (j <= y) || (x + 1 == i) != (y + 1 == j) || (i + 1 == x) != (j + 1 == y) {
                return false;
            }
        }
    }
    if rounds == 0 {
        return true;
    }
    let spoiler_on = |a: &[usize], b: &[usize], pa: &mut Vec<usize>, pb: &mut Vec<usize>| {
        (0..a.len()).all(|i| {
            pa.push(i);
            let ok = (0..b.len()).any(|j| {
                pb.push(j);
                let ok = duplicator_wins(a, b, pa, pb, rounds - 1);
                pb.pop();
                ok
            });
            pa.pop();
            ok
        })
    };
    spoiler_on(u, w, pu, pw) && spoiler_on(w, u, pw, pu)
}

fn theory_constants(r: &mut Report) {
    let ab = Alphabet::letters(["a", "b"]).unwrap();
    let ws = words(2, 4);
    let mut ok = true;
    let mut sizes = Vec::new();
    for (m, expected) in [(0, 1), (1, 3)] {
        let th = theory_algebra(&ab, m).unwrap();
        let mut classes: HashMap<usize, usize> = HashMap::new();
        for u in &ws {
            let id = ws.iter().position(|w| duplicator_wins(u, w, &mut vec![], &mut vec![], m)).unwrap();
            classes.entry(id).or_default();
            for w in &ws {
                let brute = duplicator_wins(u, w, &mut vec![], &mut vec![], m);
                ok &= brute == (th.class_of(u).unwrap() == th.class_of(w).unwrap());
            }
        }
        ok &= classes.len() == expected && th.algebra.len() == expected;
        sizes.push(format!("|Θ_{m}| = {} (oracle {})", th.algebra.len(), classes.len()));
    }
    let c = suite::run("theory-algebra", SEED).unwrap();
    r.line("theory algebra", ok && c.passed, format!("{}; table vs concatenation: {}", sizes.join(", "), c.detail));
}

fn end_to_end(r: &mut Report) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_emalg")).args(["laws", "--seed", "0"]).output().unwrap();
    let took = start.elapsed();
    r.line(
        "end-to-end laws",
        out.status.success() && took < Duration::from_secs(120),
        format!("exit {:?} in {took:.1?}", out.status.code()),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failed: 0 };
    r.suite("monad laws", "monad-laws", Some(Duration::from_secs(10)));
    r.suite("congruence characterisations", "congruences", None);
    r.suite("terminality", "terminality", None);
    syntactic_constants(&mut r);
    r.suite("derivative decomposition", "decomposition", None);
    r.suite("dual deciders", "dual-deciders", None);
    theory_constants(&mut r);
    r.suite("wilke invariance", "wilke-invariance", None);
    r.suite("canonical cover", "canonical-cover", None);
    r.suite("mod closure", "mod-closure", None);
    end_to_end(&mut r);
    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", r.failed);
        ExitCode::FAILURE
    }
}
