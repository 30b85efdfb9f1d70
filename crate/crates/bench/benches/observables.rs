use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sawsle_bench::equilibrated_state;
use sawsle_core::{stats_bruteforce, stats_fast, Exponents};

fn statistics(c: &mut Criterion) {
    let nu = Exponents::conjectured().nu;
    let mut group = c.benchmark_group("statistics");
    for n in [1000usize, 2000, 10_000] {
        let walk = equilibrated_state(n, 2).walk().clone();
        group.bench_with_input(BenchmarkId::new("fast", n), &walk, |b, w| {
            b.iter(|| stats_fast(black_box(w), nu).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bruteforce", n), &walk, |b, w| {
            b.iter(|| stats_bruteforce(black_box(w), nu).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, statistics);
criterion_main!(benches);
