use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quasiherm_bench::{chain, dense};
use quasiherm_core::kernel::default_tol_eig;
use quasiherm_core::{analyze, c64, eig_general, evolve_schrodinger, mat_exp, uniform_grid, ComplexVector, Tolerances};

fn eigensolver(c: &mut Criterion) {
    let mut g = c.benchmark_group("eig_general");
    for n in [8, 32, 96] {
        let a = dense(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| eig_general(black_box(a), default_tol_eig(n)).unwrap())
        });
    }
    g.finish();
}

fn exponential(c: &mut Criterion) {
    let mut g = c.benchmark_group("mat_exp");
    for n in [8, 32, 96] {
        let a = dense(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| mat_exp(black_box(a), c64(0.0, -2.5)).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("analyze_chain");
    for n in [4, 12, 40] {
        let (h, p) = chain(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &(h, p), |b, (h, p)| {
            b.iter(|| analyze(black_box(h), p, &Tolerances::default()).unwrap())
        });
    }
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let (h, p) = chain(12);
    let theta = analyze(&h, &p, &Tolerances::default()).unwrap().certified.unwrap().metric;
    let psi0 = ComplexVector::from_fn(12, |i, _| c64(1.0 / (1.0 + i as f64), 0.0));
    let grid = uniform_grid(50.0, 200);
    c.bench_function("evolve_schrodinger_chain12_200", |b| {
        b.iter(|| evolve_schrodinger(black_box(&h), &psi0, &grid, &theta).unwrap())
    });
}

criterion_group!(benches, eigensolver, exponential, pipeline, dynamics);
criterion_main!(benches);
