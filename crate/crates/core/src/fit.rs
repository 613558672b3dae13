//! Weighted straight-line fits used by the growth and Ω probes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
    /// Weighted RMS residual.
    pub residual: f64,
    pub points: usize,
}

/// Weighted least-squares fit of `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || weights.is_some_and(|w| w.len() != n) {
        return Err(Error::domain("fit inputs have mismatched lengths"));
    }
    if n < 2 {
        return Err(Error::domain("at least two points are needed for a line fit"));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        sw += w(i);
        sx += w(i) * xs[i];
        sy += w(i) * ys[i];
    }
    let (mx, my) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..n {
        let dx = xs[i] - mx;
        sxx += w(i) * dx * dx;
        sxy += w(i) * dx * (ys[i] - my);
    }
    if sxx <= 0.0 {
        return Err(Error::domain("degenerate abscissae in line fit"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for i in 0..n {
        let r = ys[i] - (slope * xs[i] + intercept);
        ss += w(i) * r * r;
    }
    let residual = (ss / sw).sqrt();
    let dof = (n as f64 - 2.0).max(1.0);
    let sigma2 = ss / sw * n as f64 / dof;
    let slope_stderr = (sigma2 / (sxx / sw * n as f64)).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        residual,
        points: n,
    })
}
