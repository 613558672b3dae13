use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::{LevelCountBound, PairData, SpectralLevel, Spectrum};
use crate::error::{Error, Result};

/// Unit round sphere Sⁿ ⊂ ℝⁿ⁺¹.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereModel {
    dim: usize,
    volume: f64,
    scalar_curvature: f64,
}

impl SphereModel {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Validation(format!("sphere dimension must be at least 2, got {dim}")));
        }
        let h = (dim as f64 + 1.0) / 2.0;
        Ok(Self {
            dim,
            volume: 2.0 * PI.powf(h) / gamma(h),
            scalar_curvature: (dim * (dim - 1)) as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.scalar_curvature
    }

    pub fn eigenvalue(&self, k: u64) -> f64 {
        let k = k as f64;
        k * (k + self.dim as f64 - 1.0)
    }

    /// Dimension of the degree-k spherical harmonics, (2k+n−1)(k+n−2)!/(k!(n−1)!).
    pub fn multiplicity(&self, k: u64) -> Option<u64> {
        let n = self.dim as u128;
        let k = k as u128;
        // C(k+n−2, k) built incrementally; every prefix product is an integer.
        let mut c: u128 = 1;
        for i in 1..=k.min(n - 2) {
            let top = k.max(n - 2) + i;
            c = c.checked_mul(top)? / i;
        }
        let m = c.checked_mul(2 * k + n - 1)? / (n - 1);
        u64::try_from(m).ok()
    }

    pub fn spectrum(&self, lambda_max: f64, cap: u64) -> Result<Spectrum> {
        if !(lambda_max > 0.0) {
            return Err(Error::domain("lambda_max must be positive"));
        }
        let a = self.dim as f64 - 1.0;
        // largest k with k(k+n−1) ≤ λ²
        let mut kmax = ((-a + (a * a + 4.0 * lambda_max * lambda_max).sqrt()) / 2.0).floor() as u64 + 1;
        while kmax > 0 && self.eigenvalue(kmax).sqrt() > lambda_max {
            kmax -= 1;
        }
        if kmax >= cap {
            return Err(Error::Resource(format!(
                "sphere spectrum needs {} levels, cap is {cap}",
                kmax + 1
            )));
        }
        let mut levels = Vec::with_capacity(kmax as usize + 1);
        for k in 0..=kmax {
            let eigenvalue = self.eigenvalue(k);
            let multiplicity = self.multiplicity(k).ok_or_else(|| {
                Error::Resource(format!("multiplicity of level {k} overflows"))
            })?;
            levels.push(SpectralLevel {
                eigenvalue,
                sqrt_eigenvalue: eigenvalue.sqrt(),
                multiplicity,
                pair_data: PairData::Sphere(k),
            });
        }
        Ok(Spectrum { levels, lambda_max })
    }

    /// Σ_{j≤K} m_j ≤ 2(K+n)ⁿ/n!, and K ≤ ρ for levels with √λ ≤ ρ.
    pub fn count_bound(&self) -> LevelCountBound {
        let n = self.dim;
        LevelCountBound {
            coeff: 2.0 / gamma(n as f64 + 1.0),
            shift: n as f64,
            dim: n,
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        cos_angle(x, y).acos()
    }

    /// Normalized Gegenbauer values Cₖ^α(t)/Cₖ^α(1) for k = 0..=kmax, α = (n−1)/2.
    pub fn zonal(&self, kmax: u64, t: f64) -> Vec<f64> {
        let alpha = (self.dim as f64 - 1.0) / 2.0;
        let mut out = Vec::with_capacity(kmax as usize + 1);
        out.push(1.0);
        if kmax >= 1 {
            out.push(t);
        }
        for k in 2..=kmax as usize {
            let kf = k as f64;
            let r = (2.0 * t * (kf + alpha - 1.0) * out[k - 1] - (kf - 1.0) * out[k - 2])
                / (kf + 2.0 * alpha - 1.0);
            out.push(r);
        }
        out
    }

    pub(crate) fn pair_sum(&self, level: &SpectralLevel, t: f64) -> Result<f64> {
        let PairData::Sphere(k) = level.pair_data else {
            return Err(Error::domain("level does not belong to a sphere spectrum"));
        };
        if level.eigenvalue != self.eigenvalue(k) || Some(level.multiplicity) != self.multiplicity(k) {
            return Err(Error::domain("level is not in the sphere spectrum"));
        }
        let z = self.zonal(k, t)[k as usize];
        Ok(level.multiplicity as f64 / self.volume * z)
    }
}

pub(crate) fn cos_angle(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn s2_levels() {
        let s = SphereModel::new(2).unwrap();
        let sp = s.spectrum(3.0, u64::MAX).unwrap();
        let ev: Vec<f64> = sp.levels.iter().map(|l| l.eigenvalue).collect();
        let m: Vec<u64> = sp.levels.iter().map(|l| l.multiplicity).collect();
        assert_eq!(ev, vec![0.0, 2.0, 6.0]);
        assert_eq!(m, vec![1, 3, 5]);
        let total: u64 = (0..=40).map(|k| s.multiplicity(k).unwrap()).sum();
        assert_eq!(total, 41 * 41);
    }

    #[test]
    fn s3_multiplicity() {
        let s = SphereModel::new(3).unwrap();
        assert_eq!(s.eigenvalue(1), 3.0);
        for k in 0..50 {
            assert_eq!(s.multiplicity(k), Some((k + 1) * (k + 1)));
        }
    }

    #[test]
    fn multiplicity_matches_factorial_formula() {
        for n in 2..8usize {
            let s = SphereModel::new(n).unwrap();
            for k in 0..20u64 {
                let num = (2 * k + n as u64 - 1) as f64 * gamma((k + n as u64 - 1) as f64);
                let den = gamma(k as f64 + 1.0) * gamma(n as f64);
                assert_relative_eq!(s.multiplicity(k).unwrap() as f64, num / den, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn volumes() {
        assert_relative_eq!(SphereModel::new(2).unwrap().volume(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(SphereModel::new(3).unwrap().volume(), 2.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn zonal_is_legendre_for_s2() {
        let s = SphereModel::new(2).unwrap();
        let t: f64 = 0.3;
        let z = s.zonal(3, t);
        assert_relative_eq!(z[2], 0.5 * (3.0 * t * t - 1.0), epsilon = 1e-15);
        assert_relative_eq!(z[3], 0.5 * (5.0 * t.powi(3) - 3.0 * t), epsilon = 1e-15);
    }

    #[test]
    fn zonal_bounded_for_large_degree() {
        let s = SphereModel::new(3).unwrap();
        let z = s.zonal(10_000, 0.123);
        assert!(z.iter().all(|v| v.abs() <= 1.0 + 1e-12));
        // Chebyshev U: U_k(cos θ)/(k+1) = sin((k+1)θ)/((k+1) sin θ)
        let th = 0.123f64.acos();
        let k = 10_000.0;
        assert_relative_eq!(z[10_000], ((k + 1.0) * th).sin() / ((k + 1.0) * th.sin()), epsilon = 1e-10);
    }
}
