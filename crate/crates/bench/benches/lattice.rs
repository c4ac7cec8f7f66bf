use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use noise_lattice::chaos::first_chaos;
use noise_lattice::cofinite::{self, CofElem};
use noise_lattice::randsup;
use noise_lattice::spectrum::spectral_decompose;
use noise_lattice::{gen, Ntba, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn partitions(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let space = gen::space::<Rational>(&mut rng, 8);
    let (x, y) = (gen::partition(&mut rng, &space), gen::partition(&mut rng, &space));
    c.bench_function("meet", |b| b.iter(|| black_box(&x).meet(black_box(&y))));
    c.bench_function("join", |b| b.iter(|| black_box(&x).join(black_box(&y))));
    c.bench_function("independent", |b| {
        b.iter(|| black_box(&x).independent(black_box(&y)))
    });
}

fn chaos(c: &mut Criterion) {
    let mut g = c.benchmark_group("first_chaos");
    let exact = Ntba::<Rational>::parity(4).unwrap();
    let float = Ntba::<f64>::parity(4).unwrap();
    g.bench_function("parity4/rational", |b| b.iter(|| first_chaos(black_box(&exact))));
    g.bench_function("parity4/float", |b| b.iter(|| first_chaos(black_box(&float))));
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral_decompose");
    g.sample_size(20);
    let exact = Ntba::<Rational>::coordinate(5).unwrap();
    let float = Ntba::<f64>::coordinate(5).unwrap();
    g.bench_function("coords5/rational", |b| {
        b.iter(|| spectral_decompose(black_box(&exact)))
    });
    g.bench_function("coords5/float", |b| {
        b.iter(|| spectral_decompose(black_box(&float)))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let random = gen::ntba::<Rational>(&mut rng, 64);
    g.bench_function("random64/rational", |b| {
        b.iter(|| spectral_decompose(black_box(&random)))
    });
    g.finish();
}

fn symbolic(c: &mut Criterion) {
    let pool = cofinite::bounded_enumeration(4);
    c.bench_function("cofinite/completion", |b| {
        b.iter(|| cofinite::completion(black_box(&pool)))
    });
    let (a, e): (CofElem, CofElem) = ("y1|Y(3k)".parse().unwrap(), "x4|Y(2k)".parse().unwrap());
    c.bench_function("cofinite/join", |b| b.iter(|| black_box(&a).join(black_box(&e))));
}

fn sampling(c: &mut Criterion) {
    c.bench_function("randsup/chi_square_1e4", |b| {
        b.iter(|| randsup::distribution_test(4, 0.5, 10_000, black_box(7)))
    });
}

criterion_group!(benches, partitions, chaos, spectrum, symbolic, sampling);
criterion_main!(benches);
