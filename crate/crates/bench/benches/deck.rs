use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use deckgroup_bench::{quartic, symmetric};
use deckgroup_cli::oracle::oracle_group;
use deckgroup_core::{classify_map, deck_chain, BicriticalMap, Tolerance};
use num_complex::Complex64;

fn engine(c: &mut Criterion) {
    let tol = Tolerance::default();
    let one = Complex64::new(1.0, 0.0);
    let mut group = c.benchmark_group("deck_chain");
    for d in [2u32, 4, 6] {
        let g = symmetric(d, one);
        group.bench_with_input(BenchmarkId::new("symmetric", d), &g, |b, g| {
            b.iter(|| deck_chain(black_box(g), 4, &tol).unwrap())
        });
    }
    let f = quartic();
    group.bench_function("quartic", |b| b.iter(|| deck_chain(black_box(&f), 4, &tol).unwrap()));
    let p = BicriticalMap::power(5).unwrap();
    group.bench_function("power_5_k3", |b| b.iter(|| deck_chain(black_box(&p), 3, &tol).unwrap()));
    group.finish();
}

fn classify(c: &mut Criterion) {
    let tol = Tolerance::default();
    let g = symmetric(6, Complex64::new(1.0, 0.0));
    c.bench_function("classify_map/symmetric_6", |b| b.iter(|| classify_map(black_box(&g), 4, &tol).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let g = symmetric(2, Complex64::new(1.0, 0.0));
    group.bench_function("symmetric_2_k3", |b| b.iter(|| oracle_group(black_box(&g), 3, &tol).unwrap()));
    let f = quartic();
    group.bench_function("quartic_k3", |b| b.iter(|| oracle_group(black_box(&f), 3, &tol).unwrap()));
    group.finish();
}

criterion_group!(benches, engine, classify, oracle);
criterion_main!(benches);
