//! The isotuning recursion and the harness comparators.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use isotune_bench::uniform_losses;
use isotune_core::harness::best_portfolio;
use isotune_core::harness::suites::reciprocal_sequences;
use isotune_core::iso::{isotuning_sequence, MonotoneFn};

fn iso(c: &mut Criterion) {
    let a = reciprocal_sequences(1, 10_000, 7).remove(0);
    let gs: Vec<MonotoneFn> = a.iter().map(|&v| MonotoneFn::reciprocal(v)).collect();
    c.bench_function("isotuning_sequence/10k", |b| b.iter(|| isotuning_sequence(black_box(&gs))));

    let prices: Vec<Vec<f64>> = uniform_losses(5, 1000).into_iter().map(|r| r.iter().map(|x| 0.5 + x).collect()).collect();
    c.bench_function("best_portfolio/N=5,T=1000", |b| b.iter(|| best_portfolio(black_box(&prices), 5)));
}

criterion_group!(benches, iso);
criterion_main!(benches);
