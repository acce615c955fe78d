use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crossratio_core::boundary::log_cross_ratio;
use crossratio_core::reconstruction::{certify_sample, d_omega};
use crossratio_core::sample::Sampler;
use crossratio_core::suites::sample_rng;
use crossratio_core::{Field, HyperbolicSpace, TreeSpace};

fn spaces() -> Vec<(&'static str, HyperbolicSpace)> {
    [("rh:2", Field::Real, 2), ("rh:3", Field::Real, 3), ("ch:2", Field::Complex, 2), ("hh:2", Field::Quaternion, 2)]
        .into_iter()
        .map(|(name, f, n)| (name, HyperbolicSpace::new(f, n).unwrap()))
        .collect()
}

fn cross_ratio(c: &mut Criterion) {
    let mut g = c.benchmark_group("log_cross_ratio");
    for (name, x) in spaces() {
        let v = x.distinct_ideals(&mut sample_rng(1, 0), 4);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| log_cross_ratio(&x, black_box(&v[0]), &v[1], &v[2], &v[3]).unwrap())
        });
    }
    let t = TreeSpace::new(3).unwrap();
    let v = t.distinct_ideals(&mut sample_rng(1, 0), 4);
    g.bench_function(BenchmarkId::from_parameter("tree:3"), |b| {
        b.iter(|| log_cross_ratio(&t, black_box(&v[0]), &v[1], &v[2], &v[3]).unwrap())
    });
    g.finish();
}

fn omega_distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("d_omega");
    for (name, x) in spaces() {
        let mut rng = sample_rng(2, 0);
        let (e1, e2) = (x.random_chart(&mut rng).unwrap(), x.random_chart(&mut rng).unwrap());
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| d_omega(&x, black_box(&e1), &e2, 0, 0).unwrap())
        });
    }
    g.finish();
}

/// One full certification sample, including sampling, across seeds.
fn certification(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify_sample");
    for (name, x) in spaces() {
        let mut i = 0;
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                i += 1;
                certify_sample(&x, &mut sample_rng(3, i))
            })
        });
    }
    let t = TreeSpace::new(3).unwrap();
    let mut i = 0;
    g.bench_function(BenchmarkId::from_parameter("tree:3"), |b| {
        b.iter(|| {
            i += 1;
            certify_sample(&t, &mut sample_rng(3, i))
        })
    });
    g.finish();
}

criterion_group!(benches, cross_ratio, omega_distance, certification);
criterion_main!(benches);
