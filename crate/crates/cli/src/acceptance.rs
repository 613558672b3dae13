//! The acceptance suite: eleven numbered checks with pass/fail and timing.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use weyllab_core::counting::{count_series, omega_probe, SeriesKind};
use weyllab_core::diophantine::{align_intervals, box_quality, box_search, AlignmentProblem};
use weyllab_core::heat::{fit_heat_coefficients, geometric_grid, heat_samples, laplace_remainder_check};
use weyllab_core::hyperbolic::{
    conj_classes, cyclic_shifts_distinct, geodesic_growth, pressure_bounds, pressure_const, s_growth, Complex64,
    GroupPresentation, Word,
};
use weyllab_core::smoothing::{
    fit_q, k_free_space, k_geodesic_torus, k_leading, k_spectral, k_tilde_spectral, LeadingTermModel,
    TransformParams,
};
use weyllab_core::{Error, LatticeTorus, ManifoldModel, Result, SphereModel};

pub const CRITERIA: usize = 11;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub fn name(id: usize) -> &'static str {
    match id {
        1 => "pretrace oracle",
        2 => "main-term cancellation",
        3 => "leading term",
        4 => "laplace remainder probe",
        5 => "heat coefficients",
        6 => "remainder growth",
        7 => "orbit sum growth",
        8 => "closed geodesic sum",
        9 => "diophantine solvers",
        10 => "cyclic words",
        11 => "pressure",
        _ => "unknown",
    }
}

pub fn run(id: usize) -> CriterionResult {
    let start = Instant::now();
    let out: Result<(bool, String)> = match id {
        1 => pretrace_oracle(),
        2 => cancellation(),
        3 => leading_term(),
        4 => laplace_probe(),
        5 => heat_coefficients(),
        6 => remainder_growth(),
        7 => orbit_growth(),
        8 => geodesic_sums(),
        9 => diophantine(),
        10 => cyclic_words(),
        11 => pressure(),
        _ => Err(Error::Config(format!("no criterion {id}"))),
    };
    let (passed, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name: name(id),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA).map(run).collect()
}

fn random_torus(rng: &mut ChaCha8Rng, n: usize) -> Result<ManifoldModel> {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        rng.random_range(0.8..1.25)
                    } else {
                        rng.random_range(-0.25..0.25)
                    }
                })
                .collect()
        })
        .collect();
    Ok(ManifoldModel::Torus(LatticeTorus::from_rows(&rows)?))
}

fn pretrace_oracle() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..30 {
        // every fifth case is three-dimensional, at moderate λ/T to bound the spectrum size
        let n = if case % 5 == 4 { 3 } else { 2 };
        let model = random_torus(&mut rng, n)?;
        let (lambda, t) = if n == 2 {
            (rng.random_range(20.0..200.0), rng.random_range(0.5..3.0))
        } else {
            (rng.random_range(20.0..60.0), rng.random_range(2.0..3.0))
        };
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let (x, y) = (model.point(&x)?, model.point(&y)?);
        let p = TransformParams::new(lambda, t)?.with_tail_tol(1e-7);
        let spec = model.spectrum(p.required_lambda_max(&model))?;
        let ks = k_spectral(&model, &spec, &x, &y, &p)?;
        let ManifoldModel::Torus(torus) = &model else { unreachable!() };
        let kg = k_geodesic_torus(torus, &x, &y, &p)?;
        worst = worst.max((ks.value - kg).abs() / (1.0 + ks.value.abs()));
    }
    Ok((worst < 1e-6, format!("max relative deviation {worst:.2e} (limit 1e-6)")))
}

fn cancellation() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let model = ManifoldModel::Torus(LatticeTorus::unit(n)?);
        let x = model.base_point();
        let t = 0.9;
        let tol = if n == 2 { 1e-7 } else { 1e-4 };
        let top = TransformParams::new(200.0, t)?.with_tail_tol(tol);
        let spec = model.spectrum(top.required_lambda_max(&model))?;
        for lambda in [50.0, 100.0, 200.0] {
            let p = TransformParams::new(lambda, t)?.with_tail_tol(tol);
            let k = k_tilde_spectral(&model, &spec, &x, &p)?;
            worst = worst.max(k.value.abs() / lambda.powf((n as f64 - 1.0) / 2.0));
        }
    }
    Ok((worst < 1e-5, format!("max |k~|/lambda^((n-1)/2) = {worst:.2e} (limit 1e-5)")))
}

fn leading_term() -> Result<(bool, String)> {
    let (r, t) = (1.0, 2.0);
    let q = fit_q(2, r, t, 1600.0)?;
    let model = LeadingTermModel::new(2, Some(q.q))?;
    let mut worst = 0.0f64;
    for lambda in [100.0, 200.0, 400.0, 800.0] {
        // sample one period so the sup does not depend on where λ lands
        for i in 0..16 {
            let l = lambda + 2.0 * PI / r * i as f64 / 16.0;
            let p = TransformParams::new(l, t)?;
            let free = k_free_space(2, r, &p)?;
            let lead = k_leading(&model, r, 1.0, &p)?;
            let peak = (lead / (l * r + PI / 4.0).sin()).abs();
            worst = worst.max((free - lead).abs() * l.sqrt() / peak);
        }
    }
    Ok((
        worst <= 1.0,
        format!("Q(2) = {:.6}, sup |K - K_lead| lambda^(1/2)/peak = {worst:.3} (limit 1.0)", q.q),
    ))
}

fn laplace_probe() -> Result<(bool, String)> {
    let model = ManifoldModel::Sphere(SphereModel::new(3)?);
    let spec = model.spectrum(400.0)?;
    let x = model.base_point();
    let grid = geometric_grid(1e-3, 1e-2, 10)?;
    let rep = laplace_remainder_check(&model, &spec, &x, &grid, (50.0, 2000.0))?;
    let ok = rep.max_deviation <= 0.05 && rep.remainder_sup >= 0.05;
    Ok((
        ok,
        format!(
            "a1 deviation {:.2e} (limit 0.05), sup |R|/mu^(1/2) = {:.4} (need >= 0.05)",
            rep.max_deviation, rep.remainder_sup
        ),
    ))
}

fn heat_coefficients() -> Result<(bool, String)> {
    let s2 = ManifoldModel::Sphere(SphereModel::new(2)?);
    let spec = s2.spectrum(200.0)?;
    let grid = geometric_grid(5e-3, 0.1, 16)?;
    let fit = fit_heat_coefficients(&heat_samples(&s2, &spec, None, &grid)?, 2, 2)?;
    let a1 = fit.normalized[1];
    let torus = ManifoldModel::Torus(LatticeTorus::from_rows(&[vec![1.0, 0.2], vec![0.0, 1.1]])?);
    let tspec = torus.spectrum(200.0)?;
    let tgrid = geometric_grid(1e-3, 1e-2, 16)?;
    let tfit = fit_heat_coefficients(&heat_samples(&torus, &tspec, None, &tgrid)?, 2, 1)?;
    let c = tfit.normalized[1].abs();
    let ok = (a1 - 1.0 / 3.0).abs() <= 0.02 / 3.0 && c < 1e-2;
    Ok((ok, format!("S2 a1 = {a1:.6} (target 1/3, 2%), torus |c1/c0| = {c:.2e} (limit 1e-2)")))
}

fn remainder_growth() -> Result<(bool, String)> {
    let torus = ManifoldModel::Torus(LatticeTorus::unit(2)?);
    let x = torus.base_point();
    let r = count_series(&torus, &x, None, 2000.0, SeriesKind::RGlobal)?;
    let pt = omega_probe(&r, 0.0, Some((20.0, 2000.0)))?;
    let s2 = ManifoldModel::Sphere(SphereModel::new(2)?);
    let x = s2.base_point();
    let rx = count_series(&s2, &x, None, 200.0, SeriesKind::RX)?;
    let ps = omega_probe(&rx, 0.0, Some((20.0, 200.0)))?;
    let ok = (0.45..=0.75).contains(&pt.exponent) && (0.95..=1.05).contains(&ps.exponent);
    Ok((
        ok,
        format!(
            "torus R exponent {:.3} in [0.45, 0.75], S2 R_x exponent {:.3} in [0.95, 1.05]",
            pt.exponent, ps.exponent
        ),
    ))
}

fn orbit_growth() -> Result<(bool, String)> {
    let g = GroupPresentation::octagon()?;
    let x = Complex64::new(0.123, 1.17);
    let y = Complex64::new(-0.071, 0.93);
    let grid: Vec<f64> = (0..=20).map(|i| 4.0 + 0.25 * i as f64).collect();
    let rep = s_growth(&g, x, y, &grid, Some((4.0, 9.0)), 5_000_000)?;
    let (s, c) = (rep.s_fit.exponent, rep.count_fit.exponent);
    let ok = (0.35..=0.65).contains(&s) && (0.85..=1.15).contains(&c) && (0.4..=0.6).contains(&rep.ratio);
    Ok((
        ok,
        format!("S exponent {s:.3}, count exponent {c:.3}, ratio {:.3}", rep.ratio),
    ))
}

fn geodesic_sums() -> Result<(bool, String)> {
    let g = GroupPresentation::octagon()?;
    let classes = conj_classes(&g, 10.0, 5_000_000)?;
    let grid: Vec<f64> = (0..=24).map(|i| 4.0 + 0.25 * i as f64).collect();
    let rep = geodesic_growth(&classes, &grid, 1.0, 2, (4.0, 10.0))?;
    let e = rep.sum_fit.exponent;
    let h = rep.count_fit.exponent;
    let ok = (0.3..=0.7).contains(&e) && (0.85..=1.15).contains(&h);
    Ok((
        ok,
        format!(
            "{} classes, geodesic sum exponent {e:.3} in [0.3, 0.7], prime count exponent {h:.3}",
            classes.len()
        ),
    ))
}

fn diophantine() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut verified, mut successes, mut small, mut small_ok) = (true, 0, 0, 0);
    for _ in 0..200 {
        let n = rng.random_range(1..=6usize);
        let y = rng.random_range(2.0..=10.0);
        let m1 = rng.random_range(1.0..10.0);
        let radii: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
        let mut p = AlignmentProblem::new(&radii, y, m1)?.with_budget(200_000);
        if n <= 2 {
            let (lo, hi) = (p.lo, p.hi * 100.0);
            p = p.with_interval(lo, hi)?;
            small += 1;
        }
        let r = box_search(&p)?;
        if r.success {
            successes += 1;
            let q = box_quality(&radii, r.lambda);
            verified &= q < p.quality && r.lambda >= p.lo && r.lambda <= p.hi;
            if n <= 2 {
                small_ok += 1;
            }
        }
    }
    let mut align_ok = 0;
    for _ in 0..200 {
        let t = rng.random_range(100.0..1000.0);
        let a = rng.random_range(1.2..4.0);
        let y = 3.0 * a / PI * rng.random_range(1.01..3.0);
        let n = rng.random_range(1..=10usize);
        let radii: Vec<f64> = (0..n).map(|_| rng.random_range(t / a..=t)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0) / y).collect();
        let r = align_intervals(&radii, &b, t, a, y)?;
        let min_sine = radii
            .iter()
            .zip(&b)
            .map(|(rj, bj)| (r.lambda * rj + bj).sin())
            .fold(f64::INFINITY, f64::min);
        if r.success && min_sine >= 1.0 / (2.0 * t) && (0.0..=1.0).contains(&r.lambda) {
            align_ok += 1;
        }
    }
    let ok = verified && small_ok == small && align_ok == 200;
    Ok((
        ok,
        format!(
            "box: {successes}/200 found, all verified: {verified}, N<=2: {small_ok}/{small}; intervals: {align_ok}/200"
        ),
    ))
}

fn cyclic_words() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut checked, mut ok) = (0, true);
    while checked < 100 {
        let len = rng.random_range(2..=12usize);
        let letters: Vec<i32> = (0..len)
            .map(|_| {
                let g = rng.random_range(1..=2);
                if rng.random_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        let w = Word::new(letters)?.cyclic_reduce();
        if w.is_empty() || !w.is_primitive() {
            continue;
        }
        checked += 1;
        ok &= w.cyclic_reduce() == w;
        ok &= cyclic_shifts_distinct(&w)?;
        let mut square = w.letters.clone();
        square.extend_from_slice(&w.letters);
        ok &= matches!(cyclic_shifts_distinct(&Word::new(square)?), Err(Error::Domain(_)));
    }
    Ok((ok, format!("{checked} primitive words: shifts distinct, reduction idempotent, powers rejected")))
}

fn pressure() -> Result<(bool, String)> {
    let p = pressure_const(1.0, 2)?;
    let mut ok = p.h == Some(1.0) && p.pressure == Some(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let k2 = rng.random_range(0.1..3.0);
        let k1 = k2 * rng.random_range(1.0..4.0);
        let n = rng.random_range(2..=6usize);
        let b = pressure_bounds(k1, k2, n)?;
        let m = n as f64 - 1.0;
        ok &= b.pressure_lower_bound >= m * k2 / 2.0 - 1e-12;
        ok &= b.h_bounds.0 <= b.h_bounds.1 && (b.h_bounds.0 - m * k2).abs() < 1e-12 && (b.h_bounds.1 - m * k1).abs() < 1e-12;
        // P ≥ h_μL/2 ≥ (n−1)K₂/2, and P/h ≥ K₂/(2K₁)
        ok &= b.pressure_lower_bound >= b.h_bounds.0 / 2.0 - 1e-12;
        ok &= (b.ratio_bound - k2 / (2.0 * k1)).abs() < 1e-12;
        ok &= b.ratio_bound <= b.pressure_lower_bound / b.h_bounds.1 + 1e-12;
    }
    ok &= pressure_bounds(1.0, 2.0, 2).is_err();
    Ok((ok, "h = 1, P = 1/2; 50 random bound pairs consistent".into()))
}
