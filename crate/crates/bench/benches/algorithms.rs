use ceresa_core::certifier::{certify, Verdict};
use ceresa_core::heegner::{enumerate_heegner_divisor, HeegnerIndex};
use ceresa_core::newforms::NewformClient;
use ceresa_core::{decompose_heegner, gamma_n_profile, hurwitz_class_number};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_rational::Rational64;

fn class_numbers(c: &mut Criterion) {
    c.bench_function("hurwitz_class_number(3..2000)", |b| {
        b.iter(|| (3..2000i64).filter(|n| matches!(n % 4, 0 | 3)).map(|n| hurwitz_class_number(black_box(n)).unwrap()).sum::<Rational64>())
    });
}

fn heegner(c: &mut Criterion) {
    let idx = HeegnerIndex::new(343, -3, 37).unwrap();
    c.bench_function("enumerate_heegner_divisor(N=343, D=-3)", |b| b.iter(|| enumerate_heegner_divisor(black_box(&idx)).unwrap()));
    c.bench_function("decompose_heegner(N=1, m0=1999/4)", |b| {
        b.iter(|| decompose_heegner(1, black_box(Rational64::new(1999, 4)), 1).unwrap())
    });
}

fn geometry(c: &mut Criterion) {
    c.bench_function("gamma_n_profile(30)", |b| b.iter(|| gamma_n_profile(black_box(30)).unwrap()));
}

fn certificates(c: &mut Criterion) {
    let client = NewformClient::offline();
    c.bench_function("certify(6..200, offline)", |b| {
        b.iter(|| (6..200u128).filter(|&n| certify(n, Some(&client)).unwrap().verdict == Verdict::ProvenNontrivial).count())
    });
}

criterion_group!(benches, class_numbers, heegner, geometry, certificates);
criterion_main!(benches);
