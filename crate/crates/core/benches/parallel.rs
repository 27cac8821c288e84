//! Rayon-vs-sequential comparison on the data-parallel hot paths: ensemble
//! correlation-matrix assembly and batched annealing runs.
//!
//! Run with `cargo bench -p qrr-core`; build with `--no-default-features` to
//! benchmark the purely sequential binary instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qrr_core::classical::{sa_solve, Schedule};
use qrr_core::ensemble::build_matrices_shared;
use qrr_core::exec;
use qrr_core::graph::{generate_regular, ProblemInstance};
use qrr_core::qrr::Backend;

fn instances(n: usize, count: usize) -> Vec<ProblemInstance> {
    (0..count)
        .map(|s| generate_regular(n, s as u64).unwrap())
        .collect()
}

fn bench_ensemble_build(c: &mut Criterion) {
    let set = instances(128, 12);
    let mut group = c.benchmark_group("ensemble_correlation_build");
    for &parallel in &[false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_with_input(BenchmarkId::new(label, set.len()), &parallel, |b, &par| {
            b.iter(|| build_matrices_shared(&set, 1, &Backend::Exact, par).unwrap());
        });
    }
    group.finish();
}

fn bench_sa_batch(c: &mut Criterion) {
    let inst = generate_regular(128, 7).unwrap();
    let schedule = Schedule::default_geometric(128, 200).unwrap();
    let seeds: Vec<u64> = (0..32).collect();
    let mut group = c.benchmark_group("sa_seed_batch");
    for &parallel in &[false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_with_input(
            BenchmarkId::new(label, seeds.len()),
            &parallel,
            |b, &par| {
                b.iter(|| {
                    exec::map_indexed(par, &seeds, |_, &s| {
                        sa_solve(&inst, &schedule, s).unwrap().cut
                    })
                });
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_ensemble_build, bench_sa_batch);
criterion_main!(benches);
