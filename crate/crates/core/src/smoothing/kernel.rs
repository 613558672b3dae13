//! Flat-space wave-transform kernels K_{λ,T}(r).

use std::f64::consts::{FRAC_PI_2, PI};

use super::psi::{psi_derivs, S_TABLE};
use super::TransformParams;
use crate::counting::sigma_n;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// φ^{(k)}(t) for φ(t) = ψ(t/T)·cos(λt)/T, k = 0..=kmax.
pub fn phi_derivs(kmax: usize, t: f64, p: &TransformParams) -> Vec<f64> {
    let psd = psi_derivs(kmax, t / p.t);
    let mut out = vec![0.0; kmax + 1];
    let phase = p.lambda * t;
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            let c = (phase + (k - j) as f64 * FRAC_PI_2).cos();
            s += binom * p.t.powi(-(j as i32)) * psd[j] * p.lambda.powi((k - j) as i32) * c;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        *o = s / p.t;
    }
    out
}

/// Terms (c, k, e) of Dᵐ = ((1/t) d/dt)ᵐ applied to f: Σ c·f^{(k)}·t^{−e}.
fn d_operator_terms(m: usize) -> Vec<(f64, usize, i32)> {
    let mut terms = vec![(1.0, 0usize, 0i32)];
    for _ in 0..m {
        let mut next: Vec<(f64, usize, i32)> = Vec::new();
        for &(c, k, e) in &terms {
            push_term(&mut next, (c, k + 1, e + 1));
            if e != 0 {
                push_term(&mut next, (-(e as f64) * c, k, e + 2));
            }
        }
        terms = next;
    }
    terms
}

fn push_term(v: &mut Vec<(f64, usize, i32)>, t: (f64, usize, i32)) {
    if let Some(x) = v.iter_mut().find(|x| x.1 == t.1 && x.2 == t.2) {
        x.0 += t.0;
    } else {
        v.push(t);
    }
}

/// Odd dimension n = 2m+1, r > 0: K = (−1/(2π))ᵐ·Dᵐφ(r).
fn k_odd(n: usize, r: f64, p: &TransformParams) -> f64 {
    if r >= p.t {
        return 0.0;
    }
    let m = (n - 1) / 2;
    let terms = d_operator_terms(m);
    let d = phi_derivs(m, r, p);
    let s: f64 = terms.iter().map(|&(c, k, e)| c * d[k] * r.powi(-e)).sum();
    (-1.0 / (2.0 * PI)).powi(m as i32) * s
}

/// Even dimension, r > 0: descent from dimension n+1,
/// K_n(r) = 4∫₀^{√(T−r)} K_{n+1}(r+u²)(r+u²)/√(2r+u²) du.
fn k_even(n: usize, r: f64, p: &TransformParams) -> Result<f64> {
    if r >= p.t {
        return Ok(0.0);
    }
    let top = (p.t - r).sqrt();
    let f = |u: f64| {
        let s = r + u * u;
        4.0 * k_odd(n + 1, s, p) * s / (2.0 * r + u * u).sqrt()
    };
    let panel = PI / (8.0 * p.lambda.max(1.0) * top.max(1e-3));
    let q = integrate(
        f,
        0.0,
        top,
        QuadOptions {
            abs_tol: p.quad_tol,
            rel_tol: p.quad_tol,
            max_panel: panel,
            max_depth: 40,
        },
    )?;
    Ok(q.value)
}

/// The flat-space kernel K_{λ,T}(r) in dimension n.
pub fn k_free_space(n: usize, r: f64, p: &TransformParams) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("dimension must be positive"));
    }
    if !(r >= 0.0) {
        return Err(Error::domain("r must be nonnegative"));
    }
    if r == 0.0 {
        return main_term_transform(n, p);
    }
    if n % 2 == 1 {
        Ok(k_odd(n, r, p))
    } else {
        k_even(n, r, p)
    }
}

/// c_n∫₀^∞ H_{λ,T}(ρ)ρ^{n−1}dρ with c_n = nσ_n/(2π)ⁿ, by quadrature.
pub fn main_term_transform(n: usize, p: &TransformParams) -> Result<f64> {
    let cn = n as f64 * sigma_n(n) / (2.0 * PI).powi(n as i32);
    let top = p.lambda + S_TABLE / p.t;
    let f = |rho: f64| p.h(rho) * rho.powi(n as i32 - 1);
    let scale = p.lambda.max(1.0).powi(n as i32 - 1) / p.t;
    let q = integrate(
        f,
        0.0,
        top,
        QuadOptions {
            abs_tol: p.quad_tol * scale * 1e-2,
            rel_tol: 1e-13,
            max_panel: PI / (2.0 * p.t),
            max_depth: 40,
        },
    )?;
    Ok(cn * q.value)
}

/// Odd n = 2m+1 only: K(0) = (−1/π)ᵐ·m!·φ^{(2m)}(0)/(2m)!.
pub fn origin_value_odd(n: usize, p: &TransformParams) -> Result<f64> {
    if n % 2 == 0 {
        return Err(Error::domain("closed-form origin value needs odd n"));
    }
    let m = (n - 1) / 2;
    let d = phi_derivs(2 * m, 0.0, p);
    let mut ratio = 1.0;
    for j in m + 1..=2 * m {
        ratio /= j as f64;
    }
    Ok((-1.0 / PI).powi(m as i32) * ratio * d[2 * m])
}

/// n = 3 kernel through its Fourier representation
/// (1/(2π²r))∫₀^∞ H(ρ)ρ sin(ρr) dρ, for cross-checking.
pub fn k3_fourier(r: f64, p: &TransformParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("r must be positive"));
    }
    let top = p.lambda + S_TABLE / p.t;
    let panel = (PI / (2.0 * p.t)).min(PI / (4.0 * r));
    let f = |rho: f64| p.h(rho) * rho * (rho * r).sin();
    let q = integrate(
        f,
        0.0,
        top,
        QuadOptions {
            abs_tol: 1e-12 * p.lambda.max(1.0) / p.t,
            rel_tol: 1e-13,
            max_panel: panel,
            max_depth: 40,
        },
    )?;
    Ok(q.value / (2.0 * PI * PI * r))
}

/// Sum of the flat kernel over the given translate distances.
pub fn k_translate_sum(n: usize, distances: &[f64], p: &TransformParams) -> Result<f64> {
    let mut s = 0.0;
    for &r in distances {
        let r = if r < 1e-12 { 0.0 } else { r };
        s += k_free_space(n, r, p)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64, t: f64) -> TransformParams {
        TransformParams::new(lambda, t).unwrap()
    }

    #[test]
    fn d_operator_small_cases() {
        // D f = f′/t; D² f = f″/t² − f′/t³
        assert_eq!(d_operator_terms(1), vec![(1.0, 1, 1)]);
        let mut t2 = d_operator_terms(2);
        t2.sort_by_key(|x| x.1);
        assert_eq!(t2, vec![(-1.0, 1, 3), (1.0, 2, 2)]);
    }

    #[test]
    fn phi_derivatives_by_differences() {
        let p = params(37.0, 1.3);
        let t = 0.41;
        let d = phi_derivs(2, t, &p);
        let f = |s: f64| phi_derivs(0, s, &p)[0];
        let h = 1e-5;
        assert_relative_eq!(d[1], (f(t + h) - f(t - h)) / (2.0 * h), max_relative = 1e-6);
        assert_relative_eq!(d[2], (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h), max_relative = 1e-3);
    }

    #[test]
    fn n3_closed_form_matches_fourier_integral() {
        for &(lambda, t, r) in &[(40.0, 1.0, 0.3), (120.0, 2.0, 1.1), (25.0, 0.7, 0.05)] {
            let p = params(lambda, t);
            let a = k_free_space(3, r, &p).unwrap();
            let b = k3_fourier(r, &p).unwrap();
            assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{lambda} {t} {r}: {a} vs {b}");
        }
    }

    #[test]
    fn odd_origin_closed_form_matches_quadrature() {
        for n in [1usize, 3, 5] {
            let p = params(60.0, 1.5);
            let a = origin_value_odd(n, &p).unwrap();
            let b = main_term_transform(n, &p).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn n2_origin_is_plain_rho_integral() {
        let p = params(50.0, 1.0);
        let q = integrate(|r| p.h(r) * r, 0.0, 50.0 + 900.0, QuadOptions { max_panel: 1.0, ..Default::default() })
            .unwrap();
        assert_relative_eq!(k_free_space(2, 0.0, &p).unwrap(), q.value / (2.0 * PI), max_relative = 1e-10);
    }

    #[test]
    fn support_is_finite() {
        let p = params(80.0, 1.2);
        assert_eq!(k_free_space(3, 1.2, &p).unwrap(), 0.0);
        assert_eq!(k_free_space(5, 1.7, &p).unwrap(), 0.0);
        assert_eq!(k_free_space(2, 1.5, &p).unwrap(), 0.0);
        assert!(k_free_space(2, 1.19999, &p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn n2_descent_matches_hankel_integral() {
        // K₂(r) = (1/2π)∫H(ρ)ρJ₀(ρr)dρ, with J₀(x) = (1/π)∫₀^π cos(x sin θ)dθ.
        let p = params(30.0, 1.0);
        let r = 0.45;
        let j0 = |x: f64| {
            integrate(|th| (x * th.sin()).cos(), 0.0, PI, QuadOptions { max_panel: 0.05, ..Default::default() })
                .unwrap()
                .value
                / PI
        };
        let q = integrate(
            |rho| p.h(rho) * rho * j0(rho * r),
            0.0,
            30.0 + 500.0,
            QuadOptions { abs_tol: 1e-11, rel_tol: 1e-11, max_panel: 0.5, max_depth: 30 },
        )
        .unwrap();
        let a = k_free_space(2, r, &p).unwrap();
        assert!((a - q.value / (2.0 * PI)).abs() < 1e-7 * (1.0 + a.abs()), "{a} vs {}", q.value / (2.0 * PI));
    }
}
