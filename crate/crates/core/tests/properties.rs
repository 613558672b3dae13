use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weyllab_core::counting::{count_series, SeriesKind};
use weyllab_core::diophantine::{align_intervals, box_search, AlignmentProblem};
use weyllab_core::hyperbolic::{
    distance_to_axis, hyp_distance, orbit_enumerate, s_sum_to, srb_z, GroupPresentation, Isometry, Word,
};
use weyllab_core::{LatticeTorus, ManifoldModel, SphereModel};

fn torus_2d(a: f64, b: f64, c: f64, d: f64) -> ManifoldModel {
    ManifoldModel::Torus(LatticeTorus::from_rows(&[vec![a, b], vec![c, d]]).unwrap())
}

/// Dual vectors l = M⁻ᵀk (columns of M generate) with 2π|l| ≤ λ, by an
/// exhaustive box over k.
fn brute_count(rows: [[f64; 2]; 2], lambda: f64) -> u64 {
    let m = DMatrix::from_row_slice(2, 2, &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]]);
    let inv = m.try_inverse().unwrap().transpose();
    let bound = |i: usize| ((rows[0][i].hypot(rows[1][i])) * lambda / (2.0 * std::f64::consts::PI)).ceil() as i64 + 1;
    let mut count = 0;
    for k0 in -bound(0)..=bound(0) {
        for k1 in -bound(1)..=bound(1) {
            let l0 = inv[(0, 0)] * k0 as f64 + inv[(0, 1)] * k1 as f64;
            let l1 = inv[(1, 0)] * k0 as f64 + inv[(1, 1)] * k1 as f64;
            if 2.0 * std::f64::consts::PI * l0.hypot(l1) <= lambda {
                count += 1;
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_counts_match_brute_force(
        a in 0.7f64..1.3, b in -0.3f64..0.3, c in -0.3f64..0.3, d in 0.7f64..1.3, lam in 5.0f64..40.0
    ) {
        let model = torus_2d(a, b, c, d);
        let spec = model.spectrum(lam).unwrap();
        // stay clear of boundary-straddling norms
        let near = spec.levels.iter().any(|l| (l.sqrt_eigenvalue - lam).abs() < 1e-9);
        prop_assume!(!near);
        prop_assert_eq!(spec.total_multiplicity(), brute_count([[a, b], [c, d]], lam));
    }

    #[test]
    fn pair_sums_symmetric_bounded_homogeneous(
        a in 0.7f64..1.3, b in -0.3f64..0.3, d in 0.7f64..1.3,
        x0 in 0.0f64..1.0, x1 in 0.0f64..1.0, y0 in 0.0f64..1.0, y1 in 0.0f64..1.0
    ) {
        let model = torus_2d(a, b, 0.0, d);
        let spec = model.spectrum(30.0).unwrap();
        let x = model.point(&[x0, x1]).unwrap();
        let y = model.point(&[y0, y1]).unwrap();
        let v = model.volume();
        for level in &spec.levels {
            let xy = model.pair_sum(level, &x, &y).unwrap();
            let yx = model.pair_sum(level, &y, &x).unwrap();
            let xx = model.pair_sum(level, &x, &x).unwrap();
            let yy = model.pair_sum(level, &y, &y).unwrap();
            prop_assert!((xy - yx).abs() <= 1e-12 * (1.0 + xx));
            prop_assert!(xy.abs() <= (xx * yy).sqrt() * (1.0 + 1e-12) + 1e-12);
            prop_assert!((xx - level.multiplicity as f64 / v).abs() <= 1e-10 * xx);
        }
    }

    #[test]
    fn sphere_pair_sums_bounded(t0 in -1.0f64..1.0, t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let model = ManifoldModel::Sphere(SphereModel::new(2).unwrap());
        prop_assume!(t0 * t0 + t1 * t1 + t2 * t2 > 1e-2);
        let nrm = (t0 * t0 + t1 * t1 + t2 * t2).sqrt();
        let y = model.point(&[t0 / nrm, t1 / nrm, t2 / nrm]).unwrap();
        let x = model.base_point();
        let spec = model.spectrum(40.0).unwrap();
        for level in &spec.levels {
            let xy = model.pair_sum(level, &x, &y).unwrap();
            let xx = model.pair_sum(level, &x, &x).unwrap();
            prop_assert!(xy.abs() <= xx * (1.0 + 1e-10));
            prop_assert!((xy - model.pair_sum(level, &y, &x).unwrap()).abs() < 1e-10 * xx);
        }
    }

    #[test]
    fn mobius_preserves_distance(
        p in prop::collection::vec(-2.0f64..2.0, 3),
        zr in -3.0f64..3.0, zi in 0.05f64..5.0, wr in -3.0f64..3.0, wi in 0.05f64..5.0
    ) {
        // a generic SL(2,R) element from three free parameters
        let (a, b, c) = (p[0].exp(), p[1], p[2]);
        let g = Isometry::new(a, b, c, (1.0 + b * c) / a).unwrap();
        let (z, w) = (Complex64::new(zr, zi), Complex64::new(wr, wi));
        let d0 = hyp_distance(z, w).unwrap();
        let d1 = hyp_distance(g.apply(z), g.apply(w)).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
    }

    #[test]
    fn conjugation_preserves_length(
        w in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2]), 1..8),
        u in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2]), 0..6)
    ) {
        let g = GroupPresentation::schottky().unwrap();
        let w = Word::new(w).unwrap().reduce();
        let u = Word::new(u).unwrap();
        let conj = u.concat(&w).concat(&u.inverse());
        let (a, b) = (g.evaluate(&w).translation_length(), g.evaluate(&conj).translation_length());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        prop_assert_eq!(g.evaluate(&w.cyclic_reduce()).translation_length() > 0.0, !w.cyclic_reduce().is_empty());
    }

    #[test]
    fn cyclic_reduction_idempotent(w in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..20)) {
        let w = Word::new(w).unwrap();
        let r = w.cyclic_reduce();
        prop_assert!(r.is_cyclically_reduced());
        prop_assert_eq!(r.cyclic_reduce(), r.clone());
        prop_assert_eq!(r.min_rotation().min_rotation(), r.min_rotation());
    }

    #[test]
    fn box_search_deterministic(r1 in 0.5f64..3.0, r2 in 3.1f64..6.0) {
        let p = AlignmentProblem::new(&[r1, r2], 5.0, 1.0).unwrap().with_budget(200_000);
        let a = box_search(&p).unwrap();
        let b = box_search(&p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn align_intervals_feasible_and_monotone(
        radii in prop::collection::vec(0.5f64..1.0, 1..8),
        offs in prop::collection::vec(-1.0f64..1.0, 8),
        t in 100.0f64..1000.0
    ) {
        let (a, y) = (2.0, 10.0);
        let r: Vec<f64> = radii.iter().map(|s| s * t).collect();
        let b: Vec<f64> = offs[..r.len()].iter().map(|o| o / y).collect();
        let res = align_intervals(&r, &b, t, a, y).unwrap();
        prop_assert!(res.success);
        prop_assert!((0.0..=1.0).contains(&res.lambda));
        for (rj, bj) in r.iter().zip(&b) {
            let x = res.lambda * rj + bj;
            prop_assert!(x >= 1.0 / t - 1e-12 && x <= std::f64::consts::PI - 1.0 / t + 1e-12);
        }
        let r2: Vec<f64> = r.iter().map(|v| 2.0 * v).collect();
        prop_assert!(align_intervals(&r2, &b, 2.0 * t, a, y).unwrap().success);
    }
}

#[test]
fn counting_is_right_continuous() {
    let model = torus_2d(1.0, 0.0, 0.3, 1.1);
    let x = model.base_point();
    let s = count_series(&model, &x, None, 50.0, SeriesKind::NX).unwrap();
    for (i, &j) in s.jumps.iter().enumerate() {
        assert!((s.value(j) - s.cumulative[i]).abs() < 1e-12 * s.cumulative[i].max(1.0));
        let below = if i == 0 { 0.0 } else { s.cumulative[i - 1] };
        assert!((s.left_limit(j) - below).abs() < 1e-12 * s.cumulative[i].max(1.0));
    }
}

/// Unpruned enumeration of all reduced words up to a fixed length.
fn exhaustive(g: &GroupPresentation, x: Complex64, y: Complex64, t: f64, lmax: usize) -> (Vec<f64>, usize) {
    let mut out = Vec::new();
    let mut longest = 0;
    let mut layer: Vec<(Word, Isometry)> = vec![(Word::default(), Isometry::IDENTITY)];
    for len in 0..=lmax {
        for (w, m) in &layer {
            let d = hyp_distance(x, m.apply(y)).unwrap();
            if d <= t {
                out.push(d);
                longest = longest.max(len);
            }
            let _ = w;
        }
        let mut next = Vec::new();
        for (w, m) in &layer {
            for l in [1, -1, 2, -2] {
                if w.letters.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.clone();
                v.letters.push(l);
                next.push((v, m.mul(&g.letter(l))));
            }
        }
        layer = next;
    }
    out.sort_by(f64::total_cmp);
    (out, longest)
}

#[test]
fn free_orbit_complete() {
    let g = GroupPresentation::schottky().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let x = Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(0.8..1.25));
        let y = Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(0.8..1.25));
        let t = rng.random_range(3.0..5.0);
        let orbit = orbit_enumerate(&g, x, y, t, 1_000_000).unwrap();
        let (brute, longest) = exhaustive(&g, x, y, t, 9);
        assert!(longest < 8, "exhaustive depth not saturated");
        let got: Vec<f64> = orbit.entries.iter().map(|e| e.distance).collect();
        assert_eq!(got.len(), brute.len());
        for (a, b) in got.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn octagon_orbit_count_follows_area() {
    // N(T) ~ (2π/area)(cosh T − 1) with area 4π
    let g = GroupPresentation::octagon().unwrap();
    let x = Complex64::new(0.11, 1.07);
    let o = orbit_enumerate(&g, x, x, 8.0, 5_000_000).unwrap();
    let expect = (8f64.cosh() - 1.0) / 2.0;
    let got = o.entries.len() as f64;
    assert!((got / expect - 1.0).abs() < 0.15, "{got} vs {expect}");
}

#[test]
fn s_sum_positive_and_monotone() {
    let g = GroupPresentation::octagon().unwrap();
    let (x, y) = (Complex64::new(0.2, 1.1), Complex64::new(-0.1, 0.9));
    let o = orbit_enumerate(&g, x, y, 7.0, 5_000_000).unwrap();
    let mut prev = 0.0;
    for i in 1..=14 {
        let s = s_sum_to(&o, 2, 1.0, 0.5 * i as f64).unwrap();
        assert!(s >= prev && s > 0.0);
        prev = s;
    }
}

#[test]
fn orbit_distance_close_to_class_length() {
    let g = GroupPresentation::octagon().unwrap();
    let dom = g.domain.unwrap();
    let diam = dom.circumradius;
    let x = Complex64::new(0.05, 1.2);
    let o = orbit_enumerate(&g, x, x, 8.0, 5_000_000).unwrap();
    let mut checked = 0;
    for e in o.entries.iter().skip(1) {
        let l = e.matrix.translation_length();
        if distance_to_axis(&e.matrix, x).is_some_and(|d| d <= diam) {
            let dz = (srb_z(e.distance, 1.0, 2) - srb_z(l, 1.0, 2)).abs();
            assert!(dz <= 2.0 * diam + 1e-9);
            checked += 1;
        }
    }
    assert!(checked > 100);
}
