//! Counting functions N_{x,y}, N_x, N, their Weyl remainders, and
//! running-sup exponent probes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::models::{ManifoldModel, Point, Spectrum};

/// Volume of the unit ball in ℝⁿ.
pub fn sigma_n(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / (n as f64 * gamma(h))
}

/// Weyl coefficient σ_n/(2π)ⁿ.
pub fn weyl_coefficient(n: usize) -> f64 {
    sigma_n(n) / (2.0 * PI).powi(n as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    NXy,
    NX,
    NGlobal,
    RX,
    RGlobal,
    ROsc,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::NXy => "N_xy",
            SeriesKind::NX => "N_x",
            SeriesKind::NGlobal => "N",
            SeriesKind::RX => "R_x",
            SeriesKind::RGlobal => "R",
            SeriesKind::ROsc => "R_osc",
        }
    }

    fn pointwise(self) -> bool {
        !matches!(self, SeriesKind::NGlobal | SeriesKind::RGlobal)
    }
}

/// A right-continuous step function of λ minus a polynomial main term.
#[derive(Debug, Clone)]
pub struct CountingSeries {
    pub kind: SeriesKind,
    /// Jump locations √λ_i, strictly increasing.
    pub jumps: Vec<f64>,
    /// Jump sizes.
    pub sizes: Vec<f64>,
    /// Step-function value just after each jump.
    pub cumulative: Vec<f64>,
    /// Main term Σ c·λ^p as (c, p) pairs, subtracted from the step function.
    pub main: Vec<(f64, f64)>,
    pub lambda_max: f64,
}

impl CountingSeries {
    pub fn main_term(&self, lambda: f64) -> f64 {
        self.main.iter().map(|&(c, p)| c * lambda.powf(p)).sum()
    }

    fn step_right(&self, lambda: f64) -> f64 {
        let i = self.jumps.partition_point(|&j| j <= lambda);
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    fn step_left(&self, lambda: f64) -> f64 {
        let i = self.jumps.partition_point(|&j| j < lambda);
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    /// Value at λ (right limit).
    pub fn value(&self, lambda: f64) -> f64 {
        self.step_right(lambda) - self.main_term(lambda)
    }

    pub fn left_limit(&self, lambda: f64) -> f64 {
        self.step_left(lambda) - self.main_term(lambda)
    }

    /// `(λ, left limit, right limit)` at every jump.
    pub fn edge_samples(&self) -> Vec<(f64, f64, f64)> {
        self.jumps
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let m = self.main_term(j);
                let before = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
                (j, before - m, self.cumulative[i] - m)
            })
            .collect()
    }

    /// Right-continuous values on `grid ∪ jumps`, sorted by λ.
    pub fn sample(&self, grid: &[f64]) -> Vec<(f64, f64)> {
        let mut pts: Vec<f64> = grid.iter().copied().chain(self.jumps.iter().copied()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.into_iter().map(|l| (l, self.value(l))).collect()
    }
}

/// Builds a counting series from an already enumerated spectrum.
pub fn count_series_from_spectrum(
    model: &ManifoldModel,
    spectrum: &Spectrum,
    x: &Point,
    y: Option<&Point>,
    kind: SeriesKind,
) -> Result<CountingSeries> {
    let n = model.dim();
    let sizes: Vec<f64> = if kind.pointwise() {
        let y = match kind {
            SeriesKind::NXy => y.ok_or_else(|| Error::domain("N_xy needs a second point"))?,
            _ => x,
        };
        model.pair_sums(spectrum, x, y)?
    } else {
        spectrum.levels.iter().map(|l| l.multiplicity as f64).collect()
    };
    let main = match kind {
        SeriesKind::NXy | SeriesKind::NX | SeriesKind::NGlobal => Vec::new(),
        SeriesKind::RX => vec![(weyl_coefficient(n), n as f64)],
        SeriesKind::RGlobal => vec![(model.volume() * weyl_coefficient(n), n as f64)],
        SeriesKind::ROsc => osc_main_terms(model)?,
    };
    let mut cumulative = Vec::with_capacity(sizes.len());
    let mut acc = 0.0;
    for s in &sizes {
        acc += s;
        cumulative.push(acc);
    }
    Ok(CountingSeries {
        kind,
        jumps: spectrum.levels.iter().map(|l| l.sqrt_eigenvalue).collect(),
        sizes,
        cumulative,
        main,
        lambda_max: spectrum.lambda_max,
    })
}

pub fn count_series(
    model: &ManifoldModel,
    x: &Point,
    y: Option<&Point>,
    lambda_max: f64,
    kind: SeriesKind,
) -> Result<CountingSeries> {
    let spectrum = model.spectrum(lambda_max)?;
    count_series_from_spectrum(model, &spectrum, x, y, kind)
}

/// (4π)^{−n/2} Σ_{j ≤ ⌊(n−1)/2⌋} a_j λ^{n−2j}/Γ(n/2−j+1) as (c, p) pairs.
fn osc_main_terms(model: &ManifoldModel) -> Result<Vec<(f64, f64)>> {
    let n = model.dim();
    let pre = (4.0 * PI).powf(-(n as f64) / 2.0);
    (0..=(n - 1) / 2)
        .map(|j| {
            let a = model.heat_invariant(j)?;
            Ok((pre * a / gamma(n as f64 / 2.0 - j as f64 + 1.0), (n - 2 * j) as f64))
        })
        .collect()
}

pub fn osc_remainder(model: &ManifoldModel, x: &Point, lambda_max: f64) -> Result<CountingSeries> {
    count_series(model, x, None, lambda_max, SeriesKind::ROsc)
}

/// Running-sup and exponent fit of |f|.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub a: f64,
    /// Fitted slope of log(running max |f|) against log λ.
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub residual: f64,
    pub window: (f64, f64),
    pub fit_points: usize,
    /// sup_{μ ≤ λ} |f(μ)|/μ^a at the end of the window.
    pub final_sup: f64,
    /// (λ, running sup) at every edge sample, nondecreasing.
    #[serde(skip)]
    pub running_sup: Vec<(f64, f64)>,
}

pub const MIN_PROBE_JUMPS: usize = 50;
pub const PROBE_FIT_POINTS: usize = 64;

/// Probe of a counting series over `window` (default: upper half of the
/// available λ-range on a log scale).
pub fn omega_probe(series: &CountingSeries, a: f64, window: Option<(f64, f64)>) -> Result<ProbeReport> {
    let edges = series.edge_samples();
    let n_pos = edges.iter().filter(|e| e.0 > 0.0).count();
    if n_pos < MIN_PROBE_JUMPS {
        return Err(Error::domain(format!(
            "probe needs at least {MIN_PROBE_JUMPS} jumps, series has {n_pos}"
        )));
    }
    let eval = |l: f64| series.value(l);
    probe_edges(&edges, &eval, series.lambda_max, a, window)
}

/// Probe of arbitrary `(λ, left, right)` edge samples; `eval` gives values
/// between samples. Requires at least 20 samples.
pub fn probe_edges(
    edges: &[(f64, f64, f64)],
    eval: &dyn Fn(f64) -> f64,
    lambda_max: f64,
    a: f64,
    window: Option<(f64, f64)>,
) -> Result<ProbeReport> {
    let pos: Vec<(f64, f64, f64)> = edges.iter().copied().filter(|e| e.0 > 0.0).collect();
    if pos.len() < 20 {
        return Err(Error::domain("probe needs at least 20 positive samples"));
    }
    let first = pos[0].0;
    let (lo, hi) = window.unwrap_or_else(|| ((first * lambda_max).sqrt(), lambda_max));
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("invalid probe window [{lo}, {hi}]")));
    }

    let mut running_sup = Vec::with_capacity(pos.len());
    let mut sup = 0.0f64;
    for &(l, left, right) in &pos {
        sup = sup.max(left.abs().max(right.abs()) / l.powf(a));
        running_sup.push((l, sup));
    }

    // Running max of |f| from the first positive sample, read off at log-spaced λ.
    let mut prefix_max = Vec::with_capacity(pos.len());
    let mut m = 0.0f64;
    for &(_, left, right) in &pos {
        m = m.max(left.abs().max(right.abs()));
        prefix_max.push(m);
    }
    let mut xs = Vec::with_capacity(PROBE_FIT_POINTS);
    let mut ys = Vec::with_capacity(PROBE_FIT_POINTS);
    let mut final_sup = 0.0f64;
    for k in 0..PROBE_FIT_POINTS {
        let l = lo * (hi / lo).powf(k as f64 / (PROBE_FIT_POINTS - 1) as f64);
        let i = pos.partition_point(|e| e.0 <= l);
        let mut mx = if i == 0 { 0.0 } else { prefix_max[i - 1] };
        if l >= first {
            mx = mx.max(eval(l).abs());
        }
        if mx > 0.0 {
            xs.push(l.ln());
            ys.push(mx.ln());
        }
    }
    let i_hi = pos.partition_point(|e| e.0 <= hi);
    if i_hi > 0 {
        final_sup = running_sup[i_hi - 1].1;
    }
    final_sup = final_sup.max(eval(hi).abs() / hi.powf(a));
    if xs.len() < 20 {
        return Err(Error::domain("fewer than 20 usable fit points in the probe window"));
    }
    let fit = fit_line(&xs, &ys, None)?;
    Ok(ProbeReport {
        a,
        exponent: fit.slope,
        exponent_stderr: fit.slope_stderr,
        residual: fit.residual,
        window: (lo, hi),
        fit_points: xs.len(),
        final_sup,
        running_sup,
    })
}
