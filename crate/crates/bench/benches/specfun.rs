use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nomaec_core::specfun::{exp_integral_ei, gaussian_q, inv_gaussian_q, tricomi_u, AccuracyPolicy};

fn bench_specfun(c: &mut Criterion) {
    let policy = AccuracyPolicy::default();
    c.bench_function("gaussian_q", |b| b.iter(|| gaussian_q(black_box(4.75))));
    c.bench_function("inv_gaussian_q_1e-6", |b| b.iter(|| inv_gaussian_q(black_box(1e-6))));
    c.bench_function("exp_integral_ei", |b| b.iter(|| exp_integral_ei(black_box(-0.0667))));

    let mut g = c.benchmark_group("tricomi_u");
    for (name, bb, z) in [("b=-3.8,z=1e-2", -3.77, 0.01), ("b=-55.7,z=3e-2", -55.7, 0.033), ("b=1.4,z=2", 1.4, 2.0)] {
        g.bench_function(name, |b| b.iter(|| tricomi_u(1.0, black_box(bb), black_box(z), &policy)));
    }
    g.finish();
}

criterion_group!(benches, bench_specfun);
criterion_main!(benches);
