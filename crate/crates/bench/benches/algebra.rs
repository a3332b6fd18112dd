use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use emalg::logic::{fo_definable, theory_algebra, EfTyper};
use emalg::syntactic::syntactic_algebra;
use emalg::varieties::{divides, SEARCH_CAP};
use emalg::{corpus, Alphabet};

fn syntactic(c: &mut Criterion) {
    let rec = corpus::language_dfa("(a|b)*ab(a|b)*b", "ab").unwrap().to_recognizer().unwrap();
    c.bench_function("syntactic_algebra", |b| b.iter(|| syntactic_algebra(black_box(&rec)).unwrap()));
}

fn ef(c: &mut Criterion) {
    let w: Vec<usize> = (0..64).map(|i| (i * 7 / 3) % 2).collect();
    c.bench_function("ef_type rank 2, length 64", |b| {
        b.iter(|| EfTyper::new().word_type(black_box(&w), 2))
    });
    let ab = Alphabet::letters(["a", "b"]).unwrap();
    c.bench_function("theory_algebra rank 1", |b| b.iter(|| theory_algebra(black_box(&ab), 1).unwrap()));
    let dfa = corpus::language("contains-aa").unwrap().unwrap();
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("fo_definable contains-aa", |b| b.iter(|| fo_definable(black_box(&dfa)).unwrap()));
    g.finish();
}

fn division(c: &mut Criterion) {
    let aa = corpus::algebra("contains_aa").unwrap();
    let semilattice = corpus::algebra("semilattice").unwrap();
    let z2 = corpus::algebra("z2").unwrap();
    c.bench_function("divides semilattice | contains_aa", |b| {
        b.iter(|| divides(black_box(&semilattice), &aa, SEARCH_CAP).unwrap())
    });
    c.bench_function("divides z2 | contains_aa", |b| b.iter(|| divides(black_box(&z2), &aa, SEARCH_CAP).unwrap()));
}

criterion_group!(benches, syntactic, ef, division);
criterion_main!(benches);
