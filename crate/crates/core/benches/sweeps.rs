use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fraclab::series;
use fraclab::{build_tables, Execution};

fn sweeps(c: &mut Criterion) {
    let mut table = build_tables(200_000).expect("sieve");
    table.build_jordan2();
    let modes = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

    let mut g = c.benchmark_group("theorem1_naive");
    g.sample_size(10);
    for (name, exec) in modes {
        g.bench_with_input(BenchmarkId::new(name, 500), &500u64, |b, &n| {
            b.iter(|| series::theorem1_partial_naive_with(&table, n, false, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("theorem1_fast");
    for (name, exec) in modes {
        g.bench_with_input(BenchmarkId::new(name, 200_000), &200_000u64, |b, &n| {
            b.iter(|| series::theorem1_partial_fast_with(&table, n, false, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("lemma1");
    for (name, exec) in modes {
        g.bench_with_input(BenchmarkId::new(name, 200_000), &200_000u64, |b, &n| {
            b.iter(|| series::lemma1_partial_with(&table, n, 0.3, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
