use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::lattice::Lattice;
use super::{LevelCountBound, PairData, SpectralLevel, Spectrum};
use crate::error::{Error, Result};

/// Relative tolerance under which two dual norms are one eigenvalue.
pub const NORM_GROUP_RTOL: f64 = 1e-10;

/// Flat torus ℝⁿ/Bℤⁿ with the lattice generated by the columns of `basis`.
#[derive(Debug, Clone)]
pub struct LatticeTorus {
    lattice: Lattice,
    dual: Lattice,
    volume: f64,
}

impl LatticeTorus {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let n = basis.nrows();
        if n < 2 {
            return Err(Error::Validation(format!("torus dimension must be at least 2, got {n}")));
        }
        let lattice = Lattice::new(basis)?;
        let dual_basis = lattice.inverse().transpose();
        let check = dual_basis.transpose() * lattice.basis();
        let dev = (check - DMatrix::<f64>::identity(n, n)).amax();
        if dev > 1e-12 * (1.0 + lattice.basis().amax() * dual_basis.amax()) {
            return Err(Error::Validation(format!(
                "dual basis check failed (deviation {dev:e})"
            )));
        }
        let dual = Lattice::new(dual_basis)?;
        let volume = lattice.covolume();
        Ok(Self {
            lattice,
            dual,
            volume,
        })
    }

    /// Unit cube torus ℝⁿ/ℤⁿ.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("torus basis must be a square matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        self.lattice.basis()
    }

    pub fn dual_basis(&self) -> &DMatrix<f64> {
        self.dual.basis()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// All levels with 2π|l*| ≤ `lambda_max`.
    pub fn spectrum(&self, lambda_max: f64, cap: u64) -> Result<Spectrum> {
        if !(lambda_max > 0.0) {
            return Err(Error::domain("lambda_max must be positive"));
        }
        let n = self.dim();
        let radius = lambda_max / (2.0 * PI);
        let zero = vec![0.0; n];
        let db = self.dual.basis();
        let mut norms: Vec<f64> = Vec::new();
        let mut vecs: Vec<f64> = Vec::new();
        let mut has_zero = false;
        let mut l = DVector::<f64>::zeros(n);
        self.dual.for_each_in_ball(&zero, radius, cap, |k, _| {
            let Some(first) = k.iter().find(|&&c| c != 0) else {
                has_zero = true;
                return;
            };
            if *first < 0 {
                return;
            }
            for i in 0..n {
                let mut s = 0.0;
                for (j, &kj) in k.iter().enumerate() {
                    s += db[(i, j)] * kj as f64;
                }
                l[i] = s;
            }
            let norm = l.norm();
            if norm <= radius * (1.0 + 1e-12) {
                norms.push(norm);
                vecs.extend(l.iter());
            }
        })?;

        let mut order: Vec<usize> = (0..norms.len()).collect();
        order.sort_by(|&a, &b| {
            norms[a]
                .total_cmp(&norms[b])
                .then_with(|| vecs[a * n..(a + 1) * n].partial_cmp(&vecs[b * n..(b + 1) * n]).unwrap())
        });

        let mut levels = Vec::new();
        if has_zero {
            levels.push(SpectralLevel {
                eigenvalue: 0.0,
                sqrt_eigenvalue: 0.0,
                multiplicity: 1,
                pair_data: PairData::Torus(Vec::new()),
            });
        }
        let mut i = 0;
        while i < order.len() {
            let first = norms[order[i]];
            let mut j = i;
            let mut half = Vec::new();
            while j < order.len() && (norms[order[j]] - first) <= NORM_GROUP_RTOL * first {
                half.extend_from_slice(&vecs[order[j] * n..(order[j] + 1) * n]);
                j += 1;
            }
            let freq = 2.0 * PI * first;
            levels.push(SpectralLevel {
                eigenvalue: freq * freq,
                sqrt_eigenvalue: freq,
                multiplicity: 2 * (j - i) as u64,
                pair_data: PairData::Torus(half),
            });
            i = j;
        }
        Ok(Spectrum {
            levels,
            lambda_max,
        })
    }

    /// Bound on the number of dual vectors with 2π|l*| ≤ ρ.
    pub fn count_bound(&self) -> LevelCountBound {
        let n = self.dim();
        let mu = 0.5 * self.dual.basis_length_sum();
        LevelCountBound {
            coeff: self.volume * crate::counting::sigma_n(n) / (2.0 * PI).powi(n as i32),
            shift: 2.0 * PI * mu,
            dim: n,
        }
    }

    /// Coordinates reduced into the fundamental cell B·[0,1)ⁿ.
    pub fn reduce(&self, x: &[f64]) -> Vec<f64> {
        let u = self.lattice.inverse() * DVector::from_column_slice(x);
        let f = u.map(|c| c - c.floor());
        (self.lattice.basis() * f).iter().copied().collect()
    }

    /// Shortest representative of x − y modulo the lattice.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let d = DVector::from_iterator(n, x.iter().zip(y).map(|(a, b)| a - b));
        let mut u = self.lattice.inverse() * d;
        u.apply(|c| *c -= c.round());
        let start = (self.lattice.basis() * &u).norm();
        let shift: Vec<f64> = u.iter().copied().collect();
        let mut best = start * start;
        // A ball of radius `start` always contains k = 0, so this never fails.
        let _ = self
            .lattice
            .for_each_in_ball(&shift, start, u64::MAX, |_, r2| best = best.min(r2));
        best.sqrt()
    }

    /// Lengths of nonzero lattice vectors up to `t`, with multiplicities.
    pub fn loop_lengths(&self, t: f64, cap: u64) -> Result<Vec<(f64, u64)>> {
        if !(t > 0.0) {
            return Err(Error::domain("loop length bound must be positive"));
        }
        let n = self.dim();
        let mut lens = Vec::new();
        self.lattice.for_each_in_ball(&vec![0.0; n], t, cap, |k, _| {
            if k.iter().any(|&c| c != 0) {
                let len = self.lattice.vector(k).norm();
                if len <= t * (1.0 + 1e-12) {
                    lens.push(len);
                }
            }
        })?;
        lens.sort_by(f64::total_cmp);
        Ok(group_sorted(&lens))
    }

    /// Translates x − y + Bk with |x − y + Bk| ≤ t, as their lengths.
    pub fn translate_distances(&self, x: &[f64], y: &[f64], t: f64, cap: u64) -> Result<Vec<f64>> {
        let n = self.dim();
        let d = DVector::from_iterator(n, x.iter().zip(y).map(|(a, b)| a - b));
        let u = self.lattice.inverse() * d;
        let shift: Vec<f64> = u.iter().copied().collect();
        let mut out = Vec::new();
        self.lattice.for_each_in_ball(&shift, t, cap, |k, _| {
            let mut v = DVector::from_iterator(n, k.iter().zip(&shift).map(|(&a, &b)| a as f64 + b));
            v = self.lattice.basis() * v;
            let r = v.norm();
            if r <= t {
                out.push(r);
            }
        })?;
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    pub(crate) fn pair_sum(&self, level: &SpectralLevel, d: &[f64]) -> Result<f64> {
        let PairData::Torus(half) = &level.pair_data else {
            return Err(Error::domain("level does not belong to a torus spectrum"));
        };
        let n = self.dim();
        if half.is_empty() {
            if level.eigenvalue != 0.0 || level.multiplicity != 1 {
                return Err(Error::domain("level is not in the torus spectrum"));
            }
            return Ok(1.0 / self.volume);
        }
        if half.len() % n != 0 || level.multiplicity != 2 * (half.len() / n) as u64 {
            return Err(Error::domain("level is not in the torus spectrum"));
        }
        let l0: f64 = half[..n].iter().map(|c| c * c).sum();
        let ev = 4.0 * PI * PI * l0;
        if (ev - level.eigenvalue).abs() > 1e-9 * level.eigenvalue {
            return Err(Error::domain("level eigenvalue does not match its dual vectors"));
        }
        let mut s = 0.0;
        for l in half.chunks_exact(n) {
            let dot: f64 = l.iter().zip(d).map(|(a, b)| a * b).sum();
            s += (2.0 * PI * dot).cos();
        }
        Ok(2.0 * s / self.volume)
    }
}

fn group_sorted(vals: &[f64]) -> Vec<(f64, u64)> {
    let mut out: Vec<(f64, u64)> = Vec::new();
    for &v in vals {
        match out.last_mut() {
            Some((first, m)) if v - *first <= NORM_GROUP_RTOL * *first => *m += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}
