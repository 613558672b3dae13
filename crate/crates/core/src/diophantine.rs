//! Simultaneous phase alignment: box search for |e^{iλr_j} − 1| < q,
//! interval intersection for sin(μr_j + b_j) ≥ 1/(2T), and the sign
//! alignment of leading-term sines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothing::phase;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentProblem {
    /// Sorted, distinct, positive.
    pub radii: Vec<f64>,
    /// Target: max_j |e^{iλr_j} − 1| < quality.
    pub quality: f64,
    pub lo: f64,
    pub hi: f64,
    /// Maximum number of objective evaluations.
    pub budget: u64,
}

impl AlignmentProblem {
    /// Quality 1/Y on [M₁, M₁·Y^N].
    pub fn new(radii: &[f64], y: f64, m1: f64) -> Result<Self> {
        if !(y > 1.0) {
            return Err(Error::domain("Y must exceed 1"));
        }
        if !(m1 > 0.0) {
            return Err(Error::domain("M1 must be positive"));
        }
        let radii = validate_radii(radii)?;
        let hi = m1 * y.powi(radii.len() as i32);
        Ok(Self {
            radii,
            quality: 1.0 / y,
            lo: m1,
            hi,
            budget: 10_000_000,
        })
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        self.lo = lo;
        self.hi = hi;
        Ok(self)
    }

    pub fn with_quality(mut self, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 2.0) {
            return Err(Error::domain("quality must lie in (0, 2)"));
        }
        self.quality = q;
        Ok(self)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

fn validate_radii(radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() {
        return Err(Error::domain("no radii"));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::domain("radii must be positive and finite"));
    }
    let mut r = radii.to_vec();
    r.sort_by(f64::total_cmp);
    for w in r.windows(2) {
        if w[1] - w[0] <= 1e-12 * w[1] {
            return Err(Error::domain(format!("radii {} and {} coincide", w[0], w[1])));
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// λ for box and sign searches, μ for interval alignment.
    pub lambda: f64,
    /// Achieved max |e^{iλr_j} − 1| (box) or min sine (interval, sign).
    pub quality: f64,
    pub evaluations: u64,
    pub success: bool,
    /// Failing stage, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

/// max_j |e^{iλr_j} − 1| by complex exponentials.
pub fn box_quality(radii: &[f64], lambda: f64) -> f64 {
    radii
        .iter()
        .map(|r| (Complex64::from_polar(1.0, lambda * r) - 1.0).norm())
        .fold(0.0, f64::max)
}

/// min_j sin(μr_j + b_j).
pub fn min_sine(radii: &[f64], offsets: &[f64], mu: f64) -> f64 {
    radii
        .iter()
        .zip(offsets)
        .map(|(r, b)| (mu * r + b).sin())
        .fold(f64::INFINITY, f64::min)
}

fn box_result(p: &AlignmentProblem, lambda: f64, claimed: bool, evaluations: u64) -> AlignmentResult {
    let quality = box_quality(&p.radii, lambda);
    AlignmentResult {
        lambda,
        quality,
        evaluations,
        success: claimed && quality < p.quality && lambda >= p.lo && lambda <= p.hi,
        stage: None,
    }
}

/// Grid scan at step (2π/max r)·q/8 with golden-section refinement of
/// promising local minima; the first verified witness in λ order wins.
pub fn box_search(p: &AlignmentProblem) -> Result<AlignmentResult> {
    validate_radii(&p.radii)?;
    let f = |l: f64| {
        p.radii
            .iter()
            .map(|r| 2.0 * (0.5 * l * r).sin().abs())
            .fold(0.0, f64::max)
    };
    let rmax = *p.radii.last().unwrap();
    let h = 2.0 * std::f64::consts::PI / rmax * p.quality / 8.0;
    let steps = ((p.hi - p.lo) / h).floor() as u64;
    let mut evals = 0u64;
    let (mut best_l, mut best_f) = (p.lo, f64::INFINITY);
    let mut prev = [f64::INFINITY; 2];
    for k in 0..=steps {
        if evals >= p.budget {
            break;
        }
        let l = p.lo + k as f64 * h;
        let v = f(l);
        evals += 1;
        if v < best_f {
            (best_l, best_f) = (l, v);
        }
        if v < p.quality {
            let r = box_result(p, l, true, evals);
            if r.success {
                return Ok(r);
            }
        }
        // prev[1] at λ − h is a local minimum worth refining
        if k >= 2 && prev[1] <= prev[0] && prev[1] <= v && prev[1] < 2.0 * p.quality {
            let (m, fm, used) = golden_min(&f, l - 2.0 * h, l, 40);
            evals += used;
            if fm < best_f {
                (best_l, best_f) = (m, fm);
            }
            if fm < p.quality {
                let r = box_result(p, m, true, evals);
                if r.success {
                    return Ok(r);
                }
            }
        }
        prev = [prev[1], v];
    }
    Ok(box_result(p, best_l, false, evals))
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: u32) -> (f64, f64, u64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (m, fm) = if fc < fd { (c, fc) } else { (d, fd) };
    (m, fm, 2 + iters as u64)
}

/// μ ∈ [0,1] with sin(μr_j + b_j) ≥ 1/(2T) for radii in [T/A, T], |b_j| ≤ 1/Y.
pub fn align_intervals(radii: &[f64], offsets: &[f64], t: f64, a: f64, y: f64) -> Result<AlignmentResult> {
    if radii.is_empty() || radii.len() != offsets.len() {
        return Err(Error::domain("radii and offsets must be nonempty and of equal length"));
    }
    if !(t > 0.0 && a >= 1.0) {
        return Err(Error::domain("need T > 0 and A >= 1"));
    }
    if !(y > 3.0 * a / std::f64::consts::PI) {
        return Err(Error::domain(format!("need Y > 3A/pi, got Y = {y}, A = {a}")));
    }
    let slack = 1e-12 * t;
    if radii.iter().any(|&r| r < t / a - slack || r > t + slack) {
        return Err(Error::domain("radii must lie in [T/A, T]"));
    }
    if offsets.iter().any(|b| !(b.abs() <= 1.0 / y * (1.0 + 1e-12))) {
        return Err(Error::domain("offsets must satisfy |b| <= 1/Y"));
    }
    let mut p1 = f64::NEG_INFINITY;
    let mut p2 = f64::INFINITY;
    for (&r, &b) in radii.iter().zip(offsets) {
        p1 = p1.max(1.0 / (t * r) - b / r);
        p2 = p2.min(std::f64::consts::PI / r - 1.0 / (t * r) - b / r);
    }
    let (lo, hi) = (p1.max(0.0), p2.min(1.0));
    let mu = if lo < hi { (lo + hi) / 2.0 } else { (p1 + p2) / 2.0 };
    let quality = min_sine(radii, offsets, mu);
    Ok(AlignmentResult {
        lambda: mu,
        quality,
        evaluations: radii.len() as u64,
        success: lo < hi && quality >= 1.0 / (2.0 * t),
        stage: if lo < hi { None } else { Some("intervals".into()) },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignParams {
    pub m1: f64,
    pub y: f64,
    /// Multiplies the nominal upper end M₁·Y^N.
    pub interval_factor: f64,
    pub budget: u64,
    /// Long radii are those in [T/A, T].
    pub a: f64,
}

impl Default for SignParams {
    fn default() -> Self {
        Self {
            m1: 1.0,
            y: 10.0,
            interval_factor: 1.0,
            budget: 10_000_000,
            a: 2.0,
        }
    }
}

/// λ making sin(λr_j + φ_n) share one sign and size across the radii.
pub fn sign_alignment(radii: &[f64], n: usize, t: f64, params: &SignParams) -> Result<AlignmentResult> {
    let radii = validate_radii(radii)?;
    let phi = phase(n);
    if n % 4 != 3 {
        let p = AlignmentProblem::new(&radii, params.y, params.m1)?
            .with_quality(0.1)?
            .with_budget(params.budget);
        let (lo, hi) = (p.lo, p.hi * params.interval_factor);
        let p = p.with_interval(lo, hi)?;
        let r = box_search(&p)?;
        let offsets = vec![phi; radii.len()];
        let quality = min_sine(&radii, &offsets, r.lambda);
        let success = r.success && quality >= phi.sin() - 0.2;
        return Ok(AlignmentResult {
            lambda: r.lambda,
            quality,
            evaluations: r.evaluations,
            success,
            stage: if success { None } else { Some("box".into()) },
        });
    }

    let long: Vec<f64> = radii.iter().copied().filter(|&r| r >= t / params.a && r <= t).collect();
    if long.is_empty() {
        return Err(Error::domain("no radii in [T/A, T]"));
    }
    // stage 1: chord quality 2 sin(1/(2Y)) keeps residual phases within 1/Y
    let q = 2.0 * (0.5 / params.y).sin();
    let p = AlignmentProblem::new(&long, params.y, params.m1)?
        .with_quality(q)?
        .with_budget(params.budget);
    let (lo, hi) = (p.lo, p.hi * params.interval_factor);
    let p = p.with_interval(lo, hi)?;
    let s1 = box_search(&p)?;
    if !s1.success {
        return Ok(AlignmentResult {
            stage: Some("box".into()),
            ..s1
        });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let offsets: Vec<f64> = long
        .iter()
        .map(|r| {
            let b = (s1.lambda * r).rem_euclid(two_pi);
            if b > std::f64::consts::PI {
                b - two_pi
            } else {
                b
            }
        })
        .map(|b: f64| b.clamp(-1.0 / params.y, 1.0 / params.y))
        .collect();
    let s2 = align_intervals(&long, &offsets, t, params.a, params.y)?;
    let lambda = s1.lambda + s2.lambda;
    let quality = min_sine(&long, &vec![0.0; long.len()], lambda);
    let success = s2.success && quality >= 1.0 / (2.0 * t);
    Ok(AlignmentResult {
        lambda,
        quality,
        evaluations: s1.evaluations + s2.evaluations,
        success,
        stage: if success { None } else { Some("intervals".into()) },
    })
}
