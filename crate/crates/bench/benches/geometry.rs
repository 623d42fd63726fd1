use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isoatlas_core::{
    extend_ball_isometry, make_atlas_from_global, metric_midpoint, sample_ball, set_diameter, stitch, AffineMap,
    Ball, Domain, MapOracle, NormDescriptor, Point,
};

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_ball");
    for label in ["lp:2:2", "lp:1:3", "hex:3"] {
        let norm: NormDescriptor = label.parse().unwrap();
        let ball = Ball::new(Point::origin(norm.dim()), 1.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(label), &norm, |b, n| {
            b.iter(|| sample_ball(n, &ball, black_box(0.05)).unwrap())
        });
    }
    group.finish();
}

fn diameter(c: &mut Criterion) {
    let mut group = c.benchmark_group("set_diameter");
    for label in ["lp:1.5:3", "lp:1:3"] {
        let norm: NormDescriptor = label.parse().unwrap();
        let cloud = sample_ball(&norm, &Ball::new(Point::origin(3), 1.0).unwrap(), 0.05).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(label), &cloud, |b, cl| {
            b.iter(|| set_diameter(cl, &norm).unwrap())
        });
    }
    group.finish();
}

fn midpoint(c: &mut Criterion) {
    let mut group = c.benchmark_group("metric_midpoint");
    group.sample_size(20);
    for label in ["lp:2:2", "lp:inf:2", "lp:1:3", "hex:3"] {
        let norm: NormDescriptor = label.parse().unwrap();
        let dim = norm.dim();
        let x0 = Point::from(vec![-0.7; dim]);
        let mut x1 = vec![0.9; dim];
        x1[0] = 0.2;
        let x1 = Point::from(x1);
        let d = norm.dist(&x0, &x1);
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| metric_midpoint(&x0, &x1, &norm, d / 200.0, d / 100.0).unwrap())
        });
    }
    group.finish();
}

fn extension(c: &mut Criterion) {
    let norm = NormDescriptor::euclidean(2).unwrap();
    let ball = Ball::new(Point::origin(2), 1.0).unwrap();
    let g = AffineMap::translation_by(&[0.3, -1.0]).compose(&AffineMap::rotation_2d(0.7)).unwrap();
    let f = MapOracle::new(Arc::new(g), Domain::Ball(ball.clone()), norm.clone()).unwrap();
    let mut group = c.benchmark_group("extend_ball_isometry");
    group.sample_size(10);
    for eta in [0.04, 0.02] {
        group.bench_with_input(BenchmarkId::from_parameter(eta), &eta, |b, &eta| {
            b.iter(|| extend_ball_isometry(&f, &ball, &norm, eta, 1e-9).unwrap())
        });
    }
    group.finish();
}

fn stitching(c: &mut Criterion) {
    let norm = NormDescriptor::euclidean(2).unwrap();
    let g = AffineMap::rotation_2d(0.4);
    let mut group = c.benchmark_group("stitch");
    group.sample_size(10);
    for radius in [1.0, 2.0] {
        let region = Ball::new(Point::origin(2), radius).unwrap();
        let atlas = make_atlas_from_global(&g, &region, &norm, 0.6, 0.5).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(atlas.len()), &atlas, |b, a| {
            b.iter(|| stitch(a, 0.05, 1e-9))
        });
    }
    group.finish();
}

criterion_group!(benches, sampling, diameter, midpoint, extension, stitching);
criterion_main!(benches);
