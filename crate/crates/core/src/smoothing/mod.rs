//! Smoothed spectral sums k_{λ,T} and their geodesic-side evaluation.

pub mod kernel;
mod leading;
pub mod psi;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kernel::{k_free_space, k_translate_sum, main_term_transform, origin_value_odd};
pub use leading::{fit_q, k_leading, phase, LeadingTermModel, QFit};
pub use psi::{TestFunction, S_TABLE};

use crate::error::{Error, Result};
use crate::models::{LatticeTorus, LevelCountBound, ManifoldModel, Point, Spectrum};

pub const DEFAULT_TAIL_TOL: f64 = 1e-6;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// (λ, T) with truncation and tolerance controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub lambda: f64,
    pub t: f64,
    /// Levels with T|√λ_i − λ| > s_max are dropped; `None` picks the
    /// smallest s_max whose tail bound meets `tail_tol`.
    pub s_max: Option<f64>,
    pub tail_tol: f64,
    pub quad_tol: f64,
}

impl TransformParams {
    pub fn new(lambda: f64, t: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("T must be positive, got {t}")));
        }
        Ok(Self {
            lambda,
            t,
            s_max: None,
            tail_tol: DEFAULT_TAIL_TOL,
            quad_tol: DEFAULT_QUAD_TOL,
        })
    }

    pub fn with_s_max(mut self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= S_TABLE) {
            return Err(Error::Config(format!("s_max must lie in (0, {S_TABLE}], got {s}")));
        }
        self.s_max = Some(s);
        Ok(self)
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    /// H_{λ,T}(r) = [ψ̂(T(r+λ)) + ψ̂(T(r−λ))]/2.
    pub fn h(&self, r: f64) -> f64 {
        let tf = TestFunction::shared();
        0.5 * (tf.hat(self.t * (r + self.lambda)) + tf.hat(self.t * (r - self.lambda)))
    }

    /// Truncation actually used for `model`.
    pub fn resolve_s_max(&self, model: &ManifoldModel) -> f64 {
        if let Some(s) = self.s_max {
            return s;
        }
        let b = model.count_bound();
        let v = model.volume();
        let mut s = 40.0;
        while s < S_TABLE {
            if tail_bound(&b, v, self, s) <= self.tail_tol {
                return s;
            }
            s += 10.0;
        }
        S_TABLE
    }

    /// Spectrum cutoff needed by `k_spectral`.
    pub fn required_lambda_max(&self, model: &ManifoldModel) -> f64 {
        self.lambda + self.resolve_s_max(model) / self.t
    }
}

/// Bound on the dropped part of Σ w_i H(√λ_i) with |w_i| ≤ mult_i/V.
pub fn tail_bound(b: &LevelCountBound, volume: f64, p: &TransformParams, s_max: f64) -> f64 {
    let tf = TestFunction::shared();
    let nup = |rho: f64| b.eval(rho) / volume;
    let env = |s: f64| tf.envelope(s);
    // Upper tail by Abel summation over unit shells in s.
    let mut upper = 0.0;
    let mut s = s_max;
    loop {
        let e0 = env(s);
        let e1 = env(s + 1.0);
        let rho = p.lambda + (s + 1.0) / p.t;
        let term = nup(rho) * (e0 - e1).max(0.0);
        upper += term;
        s += 1.0;
        if s > S_TABLE && nup(rho) * e1 < 1e-30 {
            break;
        }
        if s > 1e6 {
            upper += nup(rho) * e1;
            break;
        }
    }
    let low_rho = p.lambda - s_max / p.t;
    let lower = if low_rho >= 0.0 { nup(low_rho) * env(s_max) } else { 0.0 };
    // Mirror term ψ̂(T(ρ+λ)) beyond the table is read as zero.
    let mirror = 0.5 * nup(p.lambda + s_max / p.t) * env((p.t * p.lambda).max(S_TABLE));
    upper + lower + mirror
}

/// Truncated spectral sum with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KSpectral {
    pub value: f64,
    pub tail_bound: f64,
    pub s_max: f64,
    pub levels_used: usize,
}

/// k_{λ,T}(x,y) = Σ_i φ_i(x)φ_i(y)H_{λ,T}(√λ_i).
pub fn k_spectral(
    model: &ManifoldModel,
    spectrum: &Spectrum,
    x: &Point,
    y: &Point,
    p: &TransformParams,
) -> Result<KSpectral> {
    let s_max = p.resolve_s_max(model);
    let hi = p.lambda + s_max / p.t;
    if spectrum.lambda_max < hi {
        return Err(Error::SpectrumRange {
            needed: hi,
            available: spectrum.lambda_max,
        });
    }
    let lo = p.lambda - s_max / p.t;
    let start = spectrum.levels.partition_point(|l| l.sqrt_eigenvalue < lo);
    let end = spectrum.levels.partition_point(|l| l.sqrt_eigenvalue <= hi);
    let window = Spectrum {
        levels: spectrum.levels[start..end].to_vec(),
        lambda_max: hi,
    };
    let weights = if let (ManifoldModel::Torus(_), false) = (model, x == y) {
        window
            .levels
            .par_iter()
            .map(|l| model.pair_sum(l, x, y))
            .collect::<Result<Vec<f64>>>()?
    } else {
        model.pair_sums(&window, x, y)?
    };
    let terms: Vec<f64> = window
        .levels
        .par_iter()
        .zip(weights.par_iter())
        .map(|(l, w)| w * p.h(l.sqrt_eigenvalue))
        .collect();
    Ok(KSpectral {
        value: terms.iter().sum(),
        tail_bound: tail_bound(&model.count_bound(), model.volume(), p, s_max),
        s_max,
        levels_used: terms.len(),
    })
}

/// Σ over lattice translates with |x − y + Bk| ≤ T of the flat kernel.
pub fn k_geodesic_torus(torus: &LatticeTorus, x: &Point, y: &Point, p: &TransformParams) -> Result<f64> {
    let d = torus.translate_distances(x.coords(), y.coords(), p.t, crate::models::DEFAULT_ENUM_CAP)?;
    let vals: Vec<f64> = d
        .par_iter()
        .map(|&r| kernel::k_translate_sum(torus.dim(), &[r], p))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.iter().sum())
}

/// k̃ = k_{λ,T}(x,x) minus the transformed Weyl main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTilde {
    pub value: f64,
    pub k_spectral: f64,
    pub main_term: f64,
    pub tail_bound: f64,
}

pub fn k_tilde_spectral(model: &ManifoldModel, spectrum: &Spectrum, x: &Point, p: &TransformParams) -> Result<KTilde> {
    let k = k_spectral(model, spectrum, x, x, p)?;
    let m = main_term_transform(model.dim(), p)?;
    Ok(KTilde {
        value: k.value - m,
        k_spectral: k.value,
        main_term: m,
        tail_bound: k.tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LatticeTorus, SphereModel};
    use approx::assert_relative_eq;

    #[test]
    fn window_examples() {
        let tf = TestFunction::shared();
        let p = TransformParams::new(100.0, 2.0).unwrap();
        assert_relative_eq!(p.h(100.0), tf.integral() / 2.0, epsilon = 1e-10);
        let p = TransformParams::new(400.0, 1.0).unwrap();
        assert_relative_eq!(p.h(405.0), tf.hat(5.0) / 2.0, epsilon = 1e-14);
        // symmetric in (λ, r)
        let p = TransformParams::new(40.0, 1.0).unwrap();
        let q = TransformParams::new(45.0, 1.0).unwrap();
        assert_eq!(p.h(45.0), q.h(40.0));
    }

    #[test]
    fn spectral_sum_needs_enough_spectrum() {
        let m = ManifoldModel::Torus(LatticeTorus::unit(2).unwrap());
        let x = m.base_point();
        let p = TransformParams::new(40.0, 1.0).unwrap();
        let sp = m.spectrum(60.0).unwrap();
        assert!(matches!(k_spectral(&m, &sp, &x, &x, &p), Err(Error::SpectrumRange { .. })));
    }

    #[test]
    fn pretrace_unit_torus_n2() {
        let m = ManifoldModel::Torus(LatticeTorus::unit(2).unwrap());
        let ManifoldModel::Torus(t) = &m else { unreachable!() };
        let x = m.base_point();
        let p = TransformParams::new(40.0, 1.5).unwrap().with_tail_tol(1e-8);
        let sp = m.spectrum(p.required_lambda_max(&m)).unwrap();
        let k = k_spectral(&m, &sp, &x, &x, &p).unwrap();
        let g = k_geodesic_torus(t, &x, &x, &p).unwrap();
        assert!((k.value - g).abs() < 1e-6 * (1.0 + k.value.abs()), "{} vs {g}", k.value);
        assert!(k.tail_bound < 1e-8);
    }

    #[test]
    fn pretrace_unit_torus_n3_offdiagonal() {
        let m = ManifoldModel::Torus(LatticeTorus::unit(3).unwrap());
        let ManifoldModel::Torus(t) = &m else { unreachable!() };
        let x = m.point(&[0.1, 0.2, 0.3]).unwrap();
        let y = m.point(&[0.45, 0.9, 0.05]).unwrap();
        let p = TransformParams::new(40.0, 1.0).unwrap().with_tail_tol(1e-8);
        let sp = m.spectrum(p.required_lambda_max(&m)).unwrap();
        let k = k_spectral(&m, &sp, &x, &y, &p).unwrap();
        let g = k_geodesic_torus(t, &x, &y, &p).unwrap();
        assert!((k.value - g).abs() < 1e-6 * (1.0 + k.value.abs()), "{} vs {g}", k.value);
    }

    #[test]
    fn far_window_is_tiny() {
        let m = ManifoldModel::Torus(LatticeTorus::unit(2).unwrap());
        let x = m.base_point();
        // λ well below √λ₁ = 2π: only the constant mode sits near the window.
        let p = TransformParams::new(3.0, 200.0).unwrap().with_s_max(300.0).unwrap();
        let sp = m.spectrum(p.required_lambda_max(&m)).unwrap();
        let k = k_spectral(&m, &sp, &x, &x, &p).unwrap();
        assert!(k.value.abs() < 1e-10, "{}", k.value);
    }

    #[test]
    fn sphere_k_tilde_changes_sign_across_level() {
        let m = ManifoldModel::Sphere(SphereModel::new(2).unwrap());
        let x = m.base_point();
        // levels √(k(k+1)) ≈ k + 1/2; T = 20 resolves them
        let at = |lambda: f64| {
            let p = TransformParams::new(lambda, 20.0).unwrap();
            let sp = m.spectrum(p.required_lambda_max(&m)).unwrap();
            k_tilde_spectral(&m, &sp, &x, &p).unwrap().value
        };
        let peak = at((20.0f64 * 21.0).sqrt());
        let gap = at((20.0f64 * 21.0).sqrt() + 0.5);
        assert!(peak > 0.0 && gap < 0.0, "{peak} {gap}");
    }
}
