use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernel::k_free_space;
use super::psi::psi;
use super::TransformParams;
use crate::error::{Error, Result};

/// φ_n = (π/4)(3 − (n mod 4)).
pub fn phase(n: usize) -> f64 {
    PI / 4.0 * (3.0 - (n % 4) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingTermModel {
    pub n: usize,
    pub q: Option<f64>,
}

impl LeadingTermModel {
    pub fn new(n: usize, q: Option<f64>) -> Result<Self> {
        if q == Some(0.0) {
            return Err(Error::Config(format!("Q({n}) must be nonzero")));
        }
        Ok(Self { n, q })
    }

    pub fn phase(&self) -> f64 {
        phase(self.n)
    }
}

/// Q·λ^{(n−1)/2}·ψ(r/T)/(T√(g r^{n−1}))·sin(λr + φ_n).
pub fn k_leading(model: &LeadingTermModel, r: f64, g: f64, p: &TransformParams) -> Result<f64> {
    let q = model
        .q
        .ok_or_else(|| Error::Config(format!("Q({}) is not set", model.n)))?;
    if !(r > 0.0) {
        return Err(Error::domain("leading term needs r > 0"));
    }
    Ok(q * amplitude(model.n, r, g, p) * (p.lambda * r + phase(model.n)).sin())
}

fn amplitude(n: usize, r: f64, g: f64, p: &TransformParams) -> f64 {
    let h = (n as f64 - 1.0) / 2.0;
    p.lambda.powf(h) * psi(r / p.t) / (p.t * (g * r.powi(n as i32 - 1)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QFit {
    pub n: usize,
    pub q: f64,
    /// RMS misfit relative to the RMS of the fitted kernel values.
    pub relative_residual: f64,
    pub lambda_range: (f64, f64),
    pub r: f64,
    pub t: f64,
}

/// Least-squares Q(n) from the flat kernel over one period λ ∈ [λ₀, λ₀ + 2π/r].
pub fn fit_q(n: usize, r: f64, t: f64, lambda0: f64) -> Result<QFit> {
    const POINTS: usize = 32;
    let hi = lambda0 + 2.0 * PI / r;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut samples = Vec::with_capacity(POINTS);
    for i in 0..POINTS {
        let lambda = lambda0 + (hi - lambda0) * i as f64 / (POINTS - 1) as f64;
        let p = TransformParams::new(lambda, t)?;
        let k = k_free_space(n, r, &p)?;
        let a = amplitude(n, r, 1.0, &p) * (lambda * r + phase(n)).sin();
        num += k * a;
        den += a * a;
        samples.push((k, a));
    }
    if den == 0.0 {
        return Err(Error::numeric("leading-term basis vanishes on the fit range", 0.0));
    }
    let q = num / den;
    let (mut res, mut norm) = (0.0, 0.0);
    for (k, a) in samples {
        res += (k - q * a).powi(2);
        norm += k * k;
    }
    Ok(QFit {
        n,
        q,
        relative_residual: (res / norm.max(f64::MIN_POSITIVE)).sqrt(),
        lambda_range: (lambda0, hi),
        r,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn phases() {
        assert_relative_eq!(phase(2), PI / 4.0);
        assert_eq!(phase(3), 0.0);
        assert_relative_eq!(phase(4), 3.0 * PI / 4.0);
    }

    #[test]
    fn missing_q_is_config_error() {
        let m = LeadingTermModel::new(2, None).unwrap();
        let p = TransformParams::new(10.0, 2.0).unwrap();
        assert!(matches!(k_leading(&m, 1.0, 1.0, &p), Err(Error::Config(_))));
        assert!(LeadingTermModel::new(2, Some(0.0)).is_err());
    }

    #[test]
    fn vanishes_on_sine_zeros() {
        let m = LeadingTermModel::new(3, Some(1.0)).unwrap();
        let p = TransformParams::new(10.0 * PI, 2.0).unwrap();
        assert!(k_leading(&m, 1.0, 1.0, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fitted_constants_match_stationary_phase() {
        let f3 = fit_q(3, 1.0, 2.0, 1600.0).unwrap();
        assert_relative_eq!(f3.q, 1.0 / (2.0 * PI), max_relative = 1e-3);
        let f2 = fit_q(2, 1.0, 2.0, 1600.0).unwrap();
        assert_relative_eq!(f2.q, 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-3);
    }
}
