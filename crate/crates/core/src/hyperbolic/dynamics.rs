//! Unstable Jacobian, SRB potential and pressure in constant curvature −K².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{g_density, CurvatureSign};

/// det dG^r on E^u: e^{(n−1)Kr}.
pub fn unstable_jacobian(r: f64, k: f64, n: usize) -> f64 {
    srb_z(r, k, n).exp()
}

/// Z(r) = ln det dG^r|_{E^u} = (n−1)Kr.
pub fn srb_z(r: f64, k: f64, n: usize) -> f64 {
    (n as f64 - 1.0) * k * r
}

/// √g(r)·r^{(n−1)/2} / e^{(n−1)Kr}.
pub fn jacobian_ratio(r: f64, k: f64, n: usize) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::domain("r must be nonnegative"));
    }
    let g = g_density(CurvatureSign::Negative, k, n, r)?;
    Ok((g * r.powi(n as i32 - 1)).sqrt() / unstable_jacobian(r, k, n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureReport {
    pub n: usize,
    pub k1: f64,
    pub k2: f64,
    /// Topological entropy, when determined.
    pub h: Option<f64>,
    pub h_bounds: (f64, f64),
    /// P(−H/2), when determined.
    pub pressure: Option<f64>,
    pub pressure_lower_bound: f64,
    /// Lower bound on P(−H/2)/h.
    pub ratio_bound: f64,
}

pub fn pressure_const(k: f64, n: usize) -> Result<PressureReport> {
    if !(k > 0.0) || n < 2 {
        return Err(Error::domain("need K > 0 and n >= 2"));
    }
    let h = (n as f64 - 1.0) * k;
    Ok(PressureReport {
        n,
        k1: k,
        k2: k,
        h: Some(h),
        h_bounds: (h, h),
        pressure: Some(h / 2.0),
        pressure_lower_bound: h / 2.0,
        ratio_bound: 0.5,
    })
}

pub fn pressure_bounds(k1: f64, k2: f64, n: usize) -> Result<PressureReport> {
    if !(k2 > 0.0) || n < 2 {
        return Err(Error::domain("need K2 > 0 and n >= 2"));
    }
    if k1 < k2 {
        return Err(Error::domain("need K1 >= K2"));
    }
    if k1 == k2 {
        return pressure_const(k1, n);
    }
    let m = n as f64 - 1.0;
    Ok(PressureReport {
        n,
        k1,
        k2,
        h: None,
        h_bounds: (m * k2, m * k1),
        pressure: None,
        pressure_lower_bound: m * k2 / 2.0,
        ratio_bound: k2 / (2.0 * k1),
    })
}
