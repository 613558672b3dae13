use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use weyllab_core::hyperbolic::{conj_classes, orbit_enumerate, Complex64, GroupPresentation, DEFAULT_ORBIT_CAP};

fn orbits(c: &mut Criterion) {
    let octagon = GroupPresentation::octagon().unwrap();
    let schottky = GroupPresentation::schottky().unwrap();
    let x = Complex64::new(0.123, 1.17);
    let y = Complex64::new(-0.071, 0.93);
    let mut g = c.benchmark_group("orbit");
    g.sample_size(10);
    g.bench_function("octagon/T=7", |b| {
        b.iter(|| orbit_enumerate(&octagon, x, y, black_box(7.0), DEFAULT_ORBIT_CAP).unwrap())
    });
    g.bench_function("schottky/T=9", |b| {
        b.iter(|| orbit_enumerate(&schottky, x, y, black_box(9.0), DEFAULT_ORBIT_CAP).unwrap())
    });
    g.bench_function("classes/octagon/T=7", |b| {
        b.iter(|| conj_classes(&octagon, black_box(7.0), DEFAULT_ORBIT_CAP).unwrap())
    });
    g.finish();
}

criterion_group!(benches, orbits);
criterion_main!(benches);
