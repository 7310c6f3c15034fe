use std::hint::black_box;

use charcensus::character::{lower_bound_terms_with, CharacterTable, TableOptions};
use charcensus::sampling::{estimate_zero_density_with, DensityOptions};
use charcensus::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn character_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("character_table");
    group.sample_size(10);
    for n in [12u32, 16] {
        for (name, execution) in MODES {
            let opts = TableOptions { execution, ..TableOptions::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| CharacterTable::build_with(black_box(n), opts).unwrap())
            });
        }
    }
    group.finish();
}

fn density_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("density_estimate");
    group.sample_size(10);
    for (name, execution) in MODES {
        let opts = DensityOptions { execution, ..DensityOptions::default() };
        group.bench_function(BenchmarkId::new(name, 20), |b| {
            b.iter(|| estimate_zero_density_with(black_box(20), 20_000, 7, opts).unwrap())
        });
    }
    group.finish();
}

fn lower_bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("lower_bound_terms");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::new(name, 600), |b| {
            b.iter(|| lower_bound_terms_with(black_box(600), execution))
        });
    }
    group.finish();
}

criterion_group!(benches, character_table, density_estimate, lower_bound);
criterion_main!(benches);
