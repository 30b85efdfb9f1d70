use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sawsle_bench::equilibrated_state;

fn pivot_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("pivot_step");
    for n in [100usize, 1000, 10_000] {
        let mut st = equilibrated_state(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(st.pivot_step()))
        });
    }
    group.finish();
}

criterion_group!(benches, pivot_step);
criterion_main!(benches);
