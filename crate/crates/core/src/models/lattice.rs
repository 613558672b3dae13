//! Short-vector enumeration in a lattice (Fincke–Pohst over the Cholesky
//! factor of the Gram matrix).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A full-rank lattice in ℝⁿ given by its basis (columns are generators).
#[derive(Debug, Clone)]
pub struct Lattice {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    /// Upper-triangular R with BᵀB = RᵀR.
    chol: DMatrix<f64>,
}

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let n = basis.nrows();
        if n == 0 || basis.ncols() != n {
            return Err(Error::Validation("lattice basis must be a non-empty square matrix".into()));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("lattice basis has non-finite entries".into()));
        }
        let det = basis.determinant();
        let scale = basis.norm().powi(n as i32);
        if det.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Validation(format!(
                "lattice basis is singular (det = {det:e})"
            )));
        }
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Validation("lattice basis is not invertible".into()))?;
        let gram = basis.transpose() * &basis;
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Validation("Gram matrix is not positive definite".into()))?
            .l()
            .transpose();
        Ok(Self {
            basis,
            inverse,
            chol,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// Column norms summed; twice the covering radius is at most this.
    pub fn basis_length_sum(&self) -> f64 {
        self.basis.column_iter().map(|c| c.norm()).sum()
    }

    pub fn vector(&self, coeffs: &[i64]) -> DVector<f64> {
        let k = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&c| c as f64));
        &self.basis * k
    }

    /// Calls `visit(k, |B(k+u)|²)` for every integer vector `k` with
    /// `|B(k + u)| ≤ radius`, where `u` is given in lattice coordinates.
    /// Fails with a resource error once more than `cap` points were found.
    pub fn for_each_in_ball<F>(&self, shift: &[f64], radius: f64, cap: u64, mut visit: F) -> Result<u64>
    where
        F: FnMut(&[i64], f64),
    {
        let n = self.dim();
        debug_assert_eq!(shift.len(), n);
        if radius < 0.0 {
            return Ok(0);
        }
        // A hair of slack so boundary points of exact lattices are not lost to
        // rounding in the triangular recursion; the caller filters exactly.
        let r2 = radius * radius * (1.0 + 1e-11) + 1e-300;
        let mut k = vec![0i64; n];
        let mut count = 0u64;
        let mut state = Walk {
            chol: &self.chol,
            shift,
            r2,
            cap,
            count: &mut count,
            k: &mut k,
        };
        state.level(n - 1, 0.0, &mut visit)?;
        Ok(count)
    }
}

struct Walk<'a> {
    chol: &'a DMatrix<f64>,
    shift: &'a [f64],
    r2: f64,
    cap: u64,
    count: &'a mut u64,
    k: &'a mut Vec<i64>,
}

impl Walk<'_> {
    fn level<F: FnMut(&[i64], f64)>(&mut self, i: usize, acc: f64, visit: &mut F) -> Result<()> {
        let n = self.k.len();
        let mut c = 0.0;
        for j in i + 1..n {
            c += self.chol[(i, j)] * (self.k[j] as f64 + self.shift[j]);
        }
        let rii = self.chol[(i, i)];
        let rem = self.r2 - acc;
        if rem < 0.0 {
            return Ok(());
        }
        let s = rem.sqrt();
        let lo = ((-s - c) / rii - self.shift[i]).ceil() as i64;
        let hi = ((s - c) / rii - self.shift[i]).floor() as i64;
        for ki in lo..=hi {
            self.k[i] = ki;
            let t = rii * (ki as f64 + self.shift[i]) + c;
            let acc2 = acc + t * t;
            if acc2 > self.r2 {
                continue;
            }
            if i == 0 {
                *self.count += 1;
                if *self.count > self.cap {
                    return Err(Error::Resource(format!(
                        "lattice enumeration exceeded the cap of {} vectors",
                        self.cap
                    )));
                }
                visit(self.k, acc2);
            } else {
                self.level(i - 1, acc2, visit)?;
            }
        }
        self.k[i] = 0;
        Ok(())
    }
}
