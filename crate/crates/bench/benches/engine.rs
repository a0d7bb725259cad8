use criterion::{criterion_group, criterion_main, Criterion};
use gennum::ghf::GhfNet;
use gennum::hft::{gsf_delta1, hft_point, log_halfwidth};
use gennum::hps::{builtin, radius, series_at, BuiltinFamily};
use gennum::hyperseries::{geometric_series, ratio_test, sum_hyperseries};
use gennum::mollifier::Mollifier;
use gennum::prelude::*;
use gennum_bench::{full_gauge, small_gauge};
use num_complex::Complex64;
use std::hint::black_box;

fn bench_valuation(c: &mut Criterion) {
    let g = full_gauge();
    let net = GenComplex::drho_pow(3.0);
    c.bench_function("valuation_drho_cubed", |b| {
        b.iter(|| valuation(black_box(&net), &g))
    });
}

fn bench_geometric_sum(c: &mut Criterion) {
    let g = full_gauge();
    let s = geometric_series("geo_0.9", (0.9f64).log2());
    c.bench_function("sum_geometric_0.9", |b| {
        b.iter(|| sum_hyperseries(black_box(&s), &g))
    });
}

fn bench_ratio_test(c: &mut Criterion) {
    let g = full_gauge();
    let s = geometric_series("geo_0.5", -1.0);
    c.bench_function("ratio_test_geometric", |b| {
        b.iter(|| ratio_test(black_box(&s), 8.0, &g))
    });
}

fn bench_radius(c: &mut Criterion) {
    let g = full_gauge();
    let a = builtin(BuiltinFamily::Exponential);
    c.bench_function("radius_exponential", |b| {
        b.iter(|| radius(black_box(&a), &g))
    });
}

fn bench_series_eval(c: &mut Criterion) {
    let g = full_gauge();
    let a = builtin(BuiltinFamily::Geometric);
    let z = GenComplex::constant(Complex64::new(0.5, 0.25));
    c.bench_function("series_at_geometric", |b| {
        b.iter(|| {
            let s = series_at(black_box(&a), &GenComplex::zero(), &z, &g);
            sum_hyperseries(&s, &g)
        })
    });
}

fn bench_mollifier(c: &mut Criterion) {
    let m = Mollifier::standard();
    c.bench_function("mollifier_mu", |b| b.iter(|| m.mu(black_box(0.37))));
    c.bench_function("mollifier_beta", |b| b.iter(|| m.beta(black_box(0.61))));
}

fn bench_goursat(c: &mut Criterion) {
    let g = small_gauge();
    let f = GhfNet::geometric_kernel();
    c.bench_function("goursat_geometric_n8", |b| {
        b.iter(|| gennum::ghf::goursat_coefficients(black_box(&f), Complex64::new(0.0, 0.0), 0.5, 8, &g))
    });
}

fn bench_transform_point(c: &mut Criterion) {
    let g = small_gauge();
    let f = gsf_delta1(log_halfwidth(1.0));
    let p = g.tail()[0].clone();
    c.bench_function("hft_delta1_omega1", |b| {
        b.iter(|| hft_point(black_box(&f), &p, Complex64::new(1.0, 0.0), 1.0))
    });
}

criterion_group!(
    benches,
    bench_valuation,
    bench_geometric_sum,
    bench_ratio_test,
    bench_radius,
    bench_series_eval,
    bench_mollifier,
    bench_goursat,
    bench_transform_point
);
criterion_main!(benches);
