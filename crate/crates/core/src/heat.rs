//! Heat traces and diagonal heat kernels from exact spectra.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::counting::{count_series_from_spectrum, sigma_n, SeriesKind};
use crate::error::{Error, Result};
use crate::models::{ManifoldModel, Point, Spectrum};

/// Admissible relative size of the truncated tail.
pub const HEAT_TAIL_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatValue {
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Bound on Σ_{√λ_i > Λ} w_i e^{−λ_i t} with Σ_{√λ_i ≤ ρ} w_i ≤ c(ρ+δ)ⁿ.
fn heat_tail(model: &ManifoldModel, lambda_max: f64, t: f64, diagonal: bool) -> f64 {
    let b = model.count_bound();
    let n = b.dim as f64;
    let x = lambda_max * lambda_max * t;
    let scale = if diagonal { 1.0 / model.volume() } else { 1.0 };
    let main = t.powf(-n / 2.0) * gamma(n / 2.0 + 1.0) * gamma_ur(n / 2.0 + 1.0, x);
    let shift = b.shift.powf(n) * (-x).exp();
    scale * b.coeff * 2f64.powf(n - 1.0) * (main + shift)
}

fn heat_sum(spectrum: &Spectrum, weights: &[f64], t: f64) -> f64 {
    // smallest terms first
    spectrum
        .levels
        .iter()
        .zip(weights)
        .rev()
        .map(|(l, w)| w * (-l.eigenvalue * t).exp())
        .sum()
}

fn weights(model: &ManifoldModel, spectrum: &Spectrum, x: Option<&Point>) -> Result<Vec<f64>> {
    match x {
        Some(x) => model.pair_sums(spectrum, x, x),
        None => Ok(spectrum.levels.iter().map(|l| l.multiplicity as f64).collect()),
    }
}

/// K(t,x,x) when `x` is given, otherwise the trace Σ e^{−λ_i t}.
pub fn heat_eval(model: &ManifoldModel, spectrum: &Spectrum, x: Option<&Point>, t: f64) -> Result<HeatValue> {
    let w = weights(model, spectrum, x)?;
    heat_eval_weighted(model, spectrum, &w, x.is_some(), t)
}

fn heat_eval_weighted(
    model: &ManifoldModel,
    spectrum: &Spectrum,
    w: &[f64],
    diagonal: bool,
    t: f64,
) -> Result<HeatValue> {
    if !(t > 0.0) {
        return Err(Error::domain("t must be positive"));
    }
    let value = heat_sum(spectrum, w, t);
    let tail = heat_tail(model, spectrum.lambda_max, t, diagonal);
    if tail > HEAT_TAIL_RTOL * value {
        let min_t = min_admissible_t(model, spectrum, w, diagonal, t);
        return Err(Error::HeatTime { t, min_t });
    }
    Ok(HeatValue {
        t,
        value,
        tail_bound: tail,
    })
}

fn min_admissible_t(model: &ManifoldModel, spectrum: &Spectrum, w: &[f64], diagonal: bool, t: f64) -> f64 {
    let ok = |s: f64| heat_tail(model, spectrum.lambda_max, s, diagonal) <= HEAT_TAIL_RTOL * heat_sum(spectrum, w, s);
    let mut lo = t;
    let mut hi = t.max(1e-12);
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Heat values on a geometric t-grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatSamples {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub tail_bounds: Vec<f64>,
    pub diagonal: bool,
}

pub fn geometric_grid(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && count >= 2) {
        return Err(Error::domain("grid needs 0 < t_min < t_max and at least two points"));
    }
    Ok((0..count)
        .map(|i| t_min * (t_max / t_min).powf(i as f64 / (count - 1) as f64))
        .collect())
}

pub fn heat_samples(model: &ManifoldModel, spectrum: &Spectrum, x: Option<&Point>, grid: &[f64]) -> Result<HeatSamples> {
    let w = weights(model, spectrum, x)?;
    let mut out = HeatSamples {
        t: Vec::with_capacity(grid.len()),
        values: Vec::with_capacity(grid.len()),
        tail_bounds: Vec::with_capacity(grid.len()),
        diagonal: x.is_some(),
    };
    for &t in grid {
        let h = heat_eval_weighted(model, spectrum, &w, x.is_some(), t)?;
        out.t.push(t);
        out.values.push(h.value);
        out.tail_bounds.push(h.tail_bound);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatFit {
    /// c_0..c_J in Σ c_j t^{j−n/2}.
    pub coefficients: Vec<f64>,
    /// c_j/c_0: the per-point a_j on homogeneous models.
    pub normalized: Vec<f64>,
    /// RMS relative misfit.
    pub residual: f64,
    pub condition: f64,
}

/// Least-squares fit of v(t) ≈ Σ_{j≤J} c_j t^{j−n/2}, relative weighting.
pub fn fit_heat_coefficients(samples: &HeatSamples, n: usize, j_terms: usize) -> Result<HeatFit> {
    if j_terms > 2 {
        return Err(Error::domain("at most three coefficients (J ≤ 2) are fitted"));
    }
    let m = samples.t.len();
    if m < j_terms + 2 {
        return Err(Error::domain("too few samples for the requested fit"));
    }
    let (tmin, tmax) = samples
        .t
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if tmax < 10.0 * tmin * (1.0 - 1e-12) {
        return Err(Error::domain("t-grid must span at least one decade"));
    }
    let cols = j_terms + 1;
    // y = v·t^{n/2} = Σ c_j t^j, rows divided by y; columns scaled by t_max^j.
    let mut a = DMatrix::<f64>::zeros(m, cols);
    let mut b = DVector::<f64>::zeros(m);
    for (i, (&t, &v)) in samples.t.iter().zip(&samples.values).enumerate() {
        let y = v * t.powf(n as f64 / 2.0);
        if !(y > 0.0) {
            return Err(Error::domain("heat values must be positive"));
        }
        for j in 0..cols {
            a[(i, j)] = (t / tmax).powi(j as i32) / y;
        }
        b[i] = 1.0;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition < 1e12) {
        return Err(Error::numeric("ill-conditioned heat fit", condition));
    }
    let sol = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::numeric(format!("heat fit solve failed: {e}"), condition))?;
    let coefficients: Vec<f64> = (0..cols).map(|j| sol[j] / tmax.powi(j as i32)).collect();
    let r = &a * &sol - &b;
    let residual = (r.norm_squared() / m as f64).sqrt();
    let c0 = coefficients[0];
    Ok(HeatFit {
        normalized: coefficients.iter().map(|c| c / c0).collect(),
        coefficients,
        residual,
        condition,
    })
}

/// 𝓡_x(μ) = 𝓝_x(μ) − σ_n μ^{n/2}/(2π)ⁿ with jumps at μ = λ_i.
#[derive(Debug, Clone)]
pub struct RenormalizedRemainder {
    pub jumps: Vec<f64>,
    pub sizes: Vec<f64>,
    cumulative: Vec<f64>,
    coeff: f64,
    half_n: f64,
}

impl RenormalizedRemainder {
    pub fn new(model: &ManifoldModel, spectrum: &Spectrum, x: &Point) -> Result<Self> {
        let sizes = model.pair_sums(spectrum, x, x)?;
        let mut acc = 0.0;
        let cumulative = sizes
            .iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect();
        let n = model.dim();
        Ok(Self {
            jumps: spectrum.levels.iter().map(|l| l.eigenvalue).collect(),
            sizes,
            cumulative,
            coeff: sigma_n(n) / (2.0 * PI).powi(n as i32),
            half_n: n as f64 / 2.0,
        })
    }

    pub fn value(&self, mu: f64) -> f64 {
        let i = self.jumps.partition_point(|&j| j <= mu);
        let step = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        step - self.coeff * mu.max(0.0).powf(self.half_n)
    }

    pub fn left_limit(&self, mu: f64) -> f64 {
        let i = self.jumps.partition_point(|&j| j < mu);
        let step = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        step - self.coeff * mu.max(0.0).powf(self.half_n)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplaceReport {
    /// (t, (4π)^{n/2} t^{n/2}·∫e^{−tμ}𝓡_x(μ)dμ) on the grid.
    pub estimates: Vec<(f64, f64)>,
    /// a_1(x) of the model.
    pub a1: f64,
    /// max |estimate − a_1|/max(|a_1|, 1) over the grid.
    pub max_deviation: f64,
    /// sup |𝓡_x(μ)|/μ^{n/2−1} over the μ-window, both jump edges.
    pub remainder_sup: f64,
    pub mu_window: (f64, f64),
}

/// The Laplace transform of the renormalized remainder, computed as the exact
/// Stieltjes sum (1/t)[K(t,x,x) − σ_nΓ(n/2+1)/(2π)ⁿ·t^{−n/2}].
pub fn laplace_remainder_check(
    model: &ManifoldModel,
    spectrum: &Spectrum,
    x: &Point,
    grid: &[f64],
    mu_window: (f64, f64),
) -> Result<LaplaceReport> {
    let n = model.dim();
    let hn = n as f64 / 2.0;
    let a1 = model.heat_invariant(1)?;
    let main = sigma_n(n) * gamma(hn + 1.0) / (2.0 * PI).powi(n as i32);
    let w = model.pair_sums(spectrum, x, x)?;
    let mut estimates = Vec::with_capacity(grid.len());
    let mut worst = 0.0f64;
    for &t in grid {
        let k = heat_eval_weighted(model, spectrum, &w, true, t)?;
        let lhs = (k.value - main * t.powf(-hn)) / t;
        let est = (4.0 * PI).powf(hn) * t.powf(hn) * lhs;
        worst = worst.max((est - a1).abs() / a1.abs().max(1.0));
        estimates.push((t, est));
    }
    let (mu_lo, mu_hi) = mu_window;
    if spectrum.lambda_max * spectrum.lambda_max < mu_hi {
        return Err(Error::SpectrumRange {
            needed: mu_hi.sqrt(),
            available: spectrum.lambda_max,
        });
    }
    let rr = RenormalizedRemainder::new(model, spectrum, x)?;
    let exponent = hn - 1.0;
    let mut sup = 0.0f64;
    let mut consider = |mu: f64, v: f64| {
        if mu >= mu_lo && mu <= mu_hi {
            sup = sup.max(v.abs() / mu.powf(exponent));
        }
    };
    for &mu in &rr.jumps {
        consider(mu, rr.left_limit(mu));
        consider(mu, rr.value(mu));
    }
    consider(mu_lo, rr.value(mu_lo));
    consider(mu_hi, rr.value(mu_hi));
    Ok(LaplaceReport {
        estimates,
        a1,
        max_deviation: worst,
        remainder_sup: sup,
        mu_window,
    })
}

/// 𝓡_x(μ) and R_x(√μ) at the given μ, for consistency checks.
pub fn remainder_pair(model: &ManifoldModel, spectrum: &Spectrum, x: &Point, mu: f64) -> Result<(f64, f64)> {
    let rr = RenormalizedRemainder::new(model, spectrum, x)?;
    let rx = count_series_from_spectrum(model, spectrum, x, None, SeriesKind::RX)?;
    Ok((rr.value(mu), rx.value(mu.sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LatticeTorus, SphereModel};
    use approx::assert_relative_eq;

    fn s2() -> ManifoldModel {
        ManifoldModel::Sphere(SphereModel::new(2).unwrap())
    }

    #[test]
    fn large_t_limits() {
        let m = s2();
        let sp = m.spectrum(50.0).unwrap();
        let x = m.base_point();
        assert_relative_eq!(heat_eval(&m, &sp, None, 40.0).unwrap().value, 1.0, epsilon = 1e-30);
        assert_relative_eq!(heat_eval(&m, &sp, Some(&x), 40.0).unwrap().value, 1.0 / (4.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn s2_trace_small_t() {
        let m = s2();
        let sp = m.spectrum(200.0).unwrap();
        let h = heat_eval(&m, &sp, None, 0.05).unwrap();
        assert_relative_eq!(h.value, 1.0 / 0.05 + 1.0 / 3.0, max_relative = 0.02);
    }

    #[test]
    fn too_small_t_reports_minimum() {
        let m = s2();
        let sp = m.spectrum(20.0).unwrap();
        match heat_eval(&m, &sp, None, 1e-4) {
            Err(Error::HeatTime { t, min_t }) => {
                assert_eq!(t, 1e-4);
                assert!(min_t > 1e-4);
                assert!(heat_eval(&m, &sp, None, min_t * 1.01).is_ok());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn torus_diagonal_homogeneous() {
        let m = ManifoldModel::Torus(LatticeTorus::from_rows(&[vec![1.0, 0.3], vec![0.0, 0.8]]).unwrap());
        let sp = m.spectrum(150.0).unwrap();
        let x = m.point(&[0.1, 0.2]).unwrap();
        let y = m.point(&[0.7, 0.05]).unwrap();
        let a = heat_eval(&m, &sp, Some(&x), 0.01).unwrap().value;
        let b = heat_eval(&m, &sp, Some(&y), 0.01).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn synthetic_fit_is_exact() {
        let n = 3;
        let c = [0.7, -0.2, 0.05];
        let t = geometric_grid(1e-3, 1e-1, 30).unwrap();
        let values: Vec<f64> = t
            .iter()
            .map(|&t| (0..3).map(|j| c[j] * t.powf(j as f64 - n as f64 / 2.0)).sum())
            .collect();
        let s = HeatSamples {
            tail_bounds: vec![0.0; t.len()],
            t,
            values,
            diagonal: false,
        };
        let f = fit_heat_coefficients(&s, n, 2).unwrap();
        for j in 0..3 {
            assert!((f.coefficients[j] - c[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn fit_rejects_narrow_grid() {
        let t = geometric_grid(1e-3, 5e-3, 10).unwrap();
        let s = HeatSamples {
            tail_bounds: vec![0.0; 10],
            values: t.iter().map(|t| 1.0 / t).collect(),
            t,
            diagonal: false,
        };
        assert!(matches!(fit_heat_coefficients(&s, 2, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn renormalized_matches_rx() {
        let m = ManifoldModel::Sphere(SphereModel::new(3).unwrap());
        let sp = m.spectrum(40.0).unwrap();
        let x = m.base_point();
        for k in 1..30u64 {
            let mu = (k * (k + 2)) as f64;
            let (a, b) = remainder_pair(&m, &sp, &x, mu).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn laplace_estimate_vanishes_on_torus() {
        let m = ManifoldModel::Torus(LatticeTorus::unit(3).unwrap());
        let sp = m.spectrum(300.0).unwrap();
        let x = m.base_point();
        let grid = geometric_grid(1e-3, 1e-2, 8).unwrap();
        let r = laplace_remainder_check(&m, &sp, &x, &grid, (50.0, 2000.0)).unwrap();
        assert_eq!(r.a1, 0.0);
        assert!(r.estimates.iter().all(|e| e.1.abs() < 1e-6), "{:?}", r.estimates);
    }

    #[test]
    fn laplace_estimate_on_s3() {
        let m = ManifoldModel::Sphere(SphereModel::new(3).unwrap());
        let sp = m.spectrum(400.0).unwrap();
        let x = m.base_point();
        let grid = geometric_grid(1e-3, 1e-2, 8).unwrap();
        let r = laplace_remainder_check(&m, &sp, &x, &grid, (50.0, 2000.0)).unwrap();
        // exact value (e^t − 1)/t
        for &(t, e) in &r.estimates {
            assert_relative_eq!(e, t.exp_m1() / t, max_relative = 1e-8);
        }
    }
}
