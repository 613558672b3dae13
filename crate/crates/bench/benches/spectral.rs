use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use weyllab_core::counting::{count_series_from_spectrum, SeriesKind};
use weyllab_core::diophantine::{box_search, AlignmentProblem};
use weyllab_core::smoothing::{k_spectral, TransformParams};
use weyllab_core::{LatticeTorus, ManifoldModel, SphereModel};

fn spectrum(c: &mut Criterion) {
    let torus = ManifoldModel::Torus(LatticeTorus::unit(2).unwrap());
    let sphere = ManifoldModel::Sphere(SphereModel::new(3).unwrap());
    let mut g = c.benchmark_group("spectrum");
    for lmax in [100.0, 400.0] {
        g.bench_with_input(BenchmarkId::new("torus2", lmax), &lmax, |b, &l| {
            b.iter(|| torus.spectrum(black_box(l)).unwrap())
        });
    }
    g.bench_function("sphere3/400", |b| b.iter(|| sphere.spectrum(black_box(400.0)).unwrap()));
    g.finish();

    let spec = torus.spectrum(300.0).unwrap();
    let x = torus.point(&[0.1, 0.2]).unwrap();
    c.bench_function("count_series/torus2", |b| {
        b.iter(|| count_series_from_spectrum(&torus, &spec, &x, None, SeriesKind::RGlobal).unwrap())
    });
}

fn smoothed(c: &mut Criterion) {
    let torus = ManifoldModel::Torus(LatticeTorus::unit(2).unwrap());
    let p = TransformParams::new(60.0, 2.0).unwrap();
    let spec = torus.spectrum(p.required_lambda_max(&torus)).unwrap();
    let x = torus.point(&[0.1, 0.2]).unwrap();
    let y = torus.point(&[0.4, 0.7]).unwrap();
    c.bench_function("k_spectral/torus2", |b| {
        b.iter(|| k_spectral(&torus, &spec, black_box(&x), black_box(&y), &p).unwrap())
    });
}

fn alignment(c: &mut Criterion) {
    let radii = [1.0, 2f64.sqrt(), 3f64.sqrt()];
    let p = AlignmentProblem::new(&radii, 4.0, 1.0).unwrap().with_budget(200_000);
    c.bench_function("box_search/3", |b| b.iter(|| box_search(black_box(&p)).unwrap()));
}

criterion_group!(benches, spectrum, smoothed, alignment);
criterion_main!(benches);
