//! PSL(2,ℝ) acting on the upper half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2×2 real matrix of determinant 1 up to sign, stored as (a, b, c, d)
/// with the first nonzero of (trace, a) positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    m: [f64; 4],
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { m: [1.0, 0.0, 0.0, 1.0] };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det - 1.0).is_finite() || (det - 1.0).abs() >= 1e-10 {
            return Err(Error::Validation(format!("isometry determinant is {det}, expected 1")));
        }
        Ok(Self::canonical([a, b, c, d]))
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    fn canonical(m: [f64; 4]) -> Self {
        let tr = m[0] + m[3];
        let flip = if tr != 0.0 { tr < 0.0 } else { m[0] < 0.0 || (m[0] == 0.0 && m[1] < 0.0) };
        if flip {
            Self { m: m.map(|v| -v) }
        } else {
            Self { m }
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3]
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = o.m;
        Self::canonical([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn inverse(&self) -> Isometry {
        let [a, b, c, d] = self.m;
        Self::canonical([d, -b, -c, a])
    }

    pub fn pow(&self, k: u32) -> Isometry {
        let mut out = Isometry::IDENTITY;
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let [a, b, c, d] = self.m;
        (z * a + b) / (z * c + d)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0
    }

    /// 2·arccosh(|tr|/2); zero for non-hyperbolic elements.
    pub fn translation_length(&self) -> f64 {
        let h = self.trace().abs() / 2.0;
        if h <= 1.0 {
            0.0
        } else {
            2.0 * h.acosh()
        }
    }

    /// Max-entry distance to `o` (both already sign-canonical).
    pub fn max_diff(&self, o: &Isometry) -> f64 {
        self.m.iter().zip(&o.m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self) -> f64 {
        self.m.iter().fold(1.0f64, |s, v| s.max(v.abs()))
    }

    /// Distance to ±identity in the Frobenius norm.
    pub fn distance_to_identity(&self) -> f64 {
        let [a, b, c, d] = self.m;
        ((a - 1.0).powi(2) + b * b + c * c + (d - 1.0).powi(2)).sqrt()
    }

    /// Endpoints of the axis on ℝ ∪ {∞} (∞ as `None`) for hyperbolic elements.
    pub fn fixed_points(&self) -> Option<(Option<f64>, Option<f64>)> {
        if !self.is_hyperbolic() {
            return None;
        }
        let [a, b, c, d] = self.m;
        let disc = ((a + d).powi(2) - 4.0).sqrt();
        if c.abs() < 1e-300 {
            return Some((None, Some(b / (d - a))));
        }
        Some((Some((a - d + disc) / (2.0 * c)), Some((a - d - disc) / (2.0 * c))))
    }
}

/// Hyperbolic distance in the upper half-plane (curvature −1).
pub fn hyp_distance(z: Complex64, w: Complex64) -> Result<f64> {
    if !(z.im > 0.0 && w.im > 0.0) {
        return Err(Error::domain("points must lie in the upper half-plane"));
    }
    Ok(hyp_distance_unchecked(z, w))
}

/// arccosh(1 + |z−w|²/(2 Im z Im w)) in the cancellation-free asinh form.
pub(crate) fn hyp_distance_unchecked(z: Complex64, w: Complex64) -> f64 {
    2.0 * ((z - w).norm() / (2.0 * (z.im * w.im).sqrt())).asinh()
}

/// Distance from z to the axis of a hyperbolic element.
pub fn distance_to_axis(g: &Isometry, z: Complex64) -> Option<f64> {
    let l = g.translation_length();
    if l <= 0.0 {
        return None;
    }
    // sinh(d(z, gz)/2) = cosh(δ)·sinh(ℓ/2)
    let d = hyp_distance_unchecked(z, g.apply(z));
    let c = ((d / 2.0).sinh() / (l / 2.0).sinh()).max(1.0);
    Some(c.acosh())
}
