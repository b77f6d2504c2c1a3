use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qmc_bench::{lattice, sobol};
use qmc_core::discrepancy::{
    discrepancy_lattice_fast, discrepancy_naive, discrepancy_naive_shift_invariant, ClosureCheck,
    KernelSpec,
};
use qmc_core::seqgen::digital_points;

fn naive_vs_fast(c: &mut Criterion) {
    let d = 6;
    let k = KernelSpec::inverse_index(d);
    let mut g = c.benchmark_group("lattice discrepancy");
    g.sample_size(10);
    for m in [8u32, 10, 12] {
        let pts = lattice(1 << m, d);
        g.bench_with_input(BenchmarkId::new("naive", 1 << m), &pts, |b, p| {
            b.iter(|| discrepancy_naive_shift_invariant(black_box(p), &k).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("fast", 1 << m), &pts, |b, p| {
            b.iter(|| discrepancy_lattice_fast(black_box(p), &k, ClosureCheck::Spot).unwrap())
        });
    }
    g.finish();
}

fn centered(c: &mut Criterion) {
    let d = 16;
    let k = KernelSpec::inverse_index(d);
    let spec = sobol(d);
    let mut g = c.benchmark_group("centered discrepancy, sobol d = 16");
    g.sample_size(10);
    for m in [8u32, 10] {
        let pts = digital_points(&spec, 1 << m).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(1 << m), &pts, |b, p| {
            b.iter(|| discrepancy_naive(black_box(p), &k).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, naive_vs_fast, centered);
criterion_main!(benches);
