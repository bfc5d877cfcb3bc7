use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optomech_core::numerics::linspace;
use optomech_core::{CouplingMode, Execution, PhysicalParams, Scenario};
use std::hint::black_box;

fn response_sweep(c: &mut Criterion) {
    let s = Scenario::prepare(PhysicalParams::reference(), CouplingMode::RedSideband).unwrap();
    let mut group = c.benchmark_group("response_sweep");
    for n in [2001usize, 20_001] {
        let grid = linspace(20.0, 70.0, n).unwrap();
        for (name, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &grid, |b, g| {
                b.iter(|| s.spectrum(black_box(g), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn diagnostics_sweep(c: &mut Criterion) {
    let s = Scenario::prepare(PhysicalParams::reference(), CouplingMode::RedSideband).unwrap();
    let grid = linspace(20.0, 70.0, 2001).unwrap();
    let mut group = c.benchmark_group("diagnostics_sweep");
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| s.diagnostics(black_box(&grid), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, response_sweep, diagnostics_sweep);
criterion_main!(benches);
