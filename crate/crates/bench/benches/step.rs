use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dlra_bench::{linear_rhs, state};
use dlra_core::integrator::{Integrator, IntegratorConfig, Scheme};
use dlra_core::linalg::{economy_svd, orthonormal_polar_factor};
use dlra_core::random::{gaussian_matrix, seeded};

fn svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for (rows, cols) in [(64, 16), (400, 25), (1000, 64)] {
        let b = gaussian_matrix(&mut seeded(1), rows, cols);
        group.bench_with_input(
            BenchmarkId::new("economy", format!("{rows}x{cols}")),
            &b,
            |bn, b| bn.iter(|| economy_svd(black_box(b)).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("polar", format!("{rows}x{cols}")),
            &b,
            |bn, b| bn.iter(|| orthonormal_polar_factor(black_box(b)).unwrap()),
        );
    }
    group.finish();
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(20);
    for (dim, size, rank) in [(3, 30, 4), (3, 60, 8), (4, 15, 5)] {
        let y = state(dim, size, rank, 2);
        let forcing = state(dim, size, rank, 3);
        for scheme in [Scheme::Euler, Scheme::ImprovedEuler, Scheme::Gauged] {
            let cfg = IntegratorConfig {
                scheme,
                ..IntegratorConfig::new(1e-3)
            };
            let mut integrator = Integrator::new(cfg, linear_rhs(forcing.clone())).unwrap();
            let id = BenchmarkId::new(scheme.name(), format!("d{dim}-I{size}-r{rank}"));
            group.bench_function(id, |bn| {
                bn.iter(|| integrator.step(black_box(&y), 0.0).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, svd, step);
criterion_main!(benches);
