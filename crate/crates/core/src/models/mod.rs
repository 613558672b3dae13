//! Model manifolds with exact spectra: flat tori and round spheres.

pub mod lattice;
mod sphere;
mod torus;

use serde::{Deserialize, Serialize};

pub use lattice::Lattice;
pub use sphere::SphereModel;
pub use torus::{LatticeTorus, NORM_GROUP_RTOL};

use crate::error::{Error, Result};

/// Default cap on enumerated lattice vectors or sphere levels.
pub const DEFAULT_ENUM_CAP: u64 = 100_000_000;

/// What is needed to evaluate the eigenspace pair sum of a level.
#[derive(Debug, Clone, PartialEq)]
pub enum PairData {
    /// One dual vector of each ±l* pair, flattened; empty for the zero level.
    Torus(Vec<f64>),
    /// Degree of the spherical harmonics.
    Sphere(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLevel {
    pub eigenvalue: f64,
    pub sqrt_eigenvalue: f64,
    pub multiplicity: u64,
    pub pair_data: PairData,
}

/// Levels sorted by eigenvalue, complete up to frequency `lambda_max`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub levels: Vec<SpectralLevel>,
    pub lambda_max: f64,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }
}

/// `coeff·(ρ + shift)^dim` bounds the number of eigenvalues (with
/// multiplicity) whose square root is at most ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelCountBound {
    pub coeff: f64,
    pub shift: f64,
    pub dim: usize,
}

impl LevelCountBound {
    pub fn eval(&self, rho: f64) -> f64 {
        if rho < 0.0 {
            return 0.0;
        }
        self.coeff * (rho + self.shift).powi(self.dim as i32)
    }
}

/// A point of a model; torus points are reduced into the fundamental cell,
/// sphere points are unit vectors in ℝⁿ⁺¹.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub enum ManifoldModel {
    Torus(LatticeTorus),
    Sphere(SphereModel),
}

/// JSON model definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Torus { basis: Vec<Vec<f64>> },
    Sphere { dim: usize },
}

impl ModelSpec {
    pub fn build(&self) -> Result<ManifoldModel> {
        match self {
            ModelSpec::Torus { basis } => Ok(ManifoldModel::Torus(LatticeTorus::from_rows(basis)?)),
            ModelSpec::Sphere { dim } => Ok(ManifoldModel::Sphere(SphereModel::new(*dim)?)),
        }
    }
}

impl ManifoldModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("model file: {e}")))?;
        spec.build()
    }

    pub fn dim(&self) -> usize {
        match self {
            ManifoldModel::Torus(t) => t.dim(),
            ManifoldModel::Sphere(s) => s.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            ManifoldModel::Torus(t) => t.volume(),
            ManifoldModel::Sphere(s) => s.volume(),
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, ManifoldModel::Torus(_))
    }

    /// Local heat invariant a_j; the same at every point of these models.
    pub fn heat_invariant(&self, j: usize) -> Result<f64> {
        match (self, j) {
            (_, 0) => Ok(1.0),
            (ManifoldModel::Torus(_), _) => Ok(0.0),
            (ManifoldModel::Sphere(s), 1) => Ok(s.scalar_curvature() / 6.0),
            (ManifoldModel::Sphere(_), _) => Err(Error::Unsupported(format!(
                "heat invariant a_{j} is not available for spheres"
            ))),
        }
    }

    /// Index of the first nonzero a_j with j ≥ 1; `None` means κ = ∞.
    pub fn kappa(&self) -> Option<usize> {
        match self {
            ManifoldModel::Torus(_) => None,
            ManifoldModel::Sphere(_) => Some(1),
        }
    }

    pub fn spectrum(&self, lambda_max: f64) -> Result<Spectrum> {
        self.spectrum_with_cap(lambda_max, DEFAULT_ENUM_CAP)
    }

    pub fn spectrum_with_cap(&self, lambda_max: f64, cap: u64) -> Result<Spectrum> {
        match self {
            ManifoldModel::Torus(t) => t.spectrum(lambda_max, cap),
            ManifoldModel::Sphere(s) => s.spectrum(lambda_max, cap),
        }
    }

    pub fn count_bound(&self) -> LevelCountBound {
        match self {
            ManifoldModel::Torus(t) => t.count_bound(),
            ManifoldModel::Sphere(s) => s.count_bound(),
        }
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("point has non-finite coordinates"));
        }
        match self {
            ManifoldModel::Torus(t) => {
                if coords.len() != t.dim() {
                    return Err(Error::domain(format!(
                        "torus point needs {} coordinates, got {}",
                        t.dim(),
                        coords.len()
                    )));
                }
                Ok(Point(t.reduce(coords)))
            }
            ManifoldModel::Sphere(s) => {
                if coords.len() != s.dim() + 1 {
                    return Err(Error::domain(format!(
                        "sphere point needs {} coordinates, got {}",
                        s.dim() + 1,
                        coords.len()
                    )));
                }
                let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::domain(format!("sphere point has norm {norm}, expected 1")));
                }
                Ok(Point(coords.iter().map(|c| c / norm).collect()))
            }
        }
    }

    /// A fixed reference point: the origin of the torus, the north pole of the sphere.
    pub fn base_point(&self) -> Point {
        match self {
            ManifoldModel::Torus(t) => Point(vec![0.0; t.dim()]),
            ManifoldModel::Sphere(s) => {
                let mut v = vec![0.0; s.dim() + 1];
                v[s.dim()] = 1.0;
                Point(v)
            }
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self {
            ManifoldModel::Torus(t) => t.distance(&x.0, &y.0),
            ManifoldModel::Sphere(s) => s.distance(&x.0, &y.0),
        }
    }

    /// Σ φ_i(x)φ_i(y) over the eigenfunctions of one level.
    pub fn pair_sum(&self, level: &SpectralLevel, x: &Point, y: &Point) -> Result<f64> {
        match self {
            ManifoldModel::Torus(t) => {
                let d: Vec<f64> = x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect();
                t.pair_sum(level, &d)
            }
            ManifoldModel::Sphere(s) => s.pair_sum(level, sphere::cos_angle(&x.0, &y.0)),
        }
    }

    /// Pair sums for every level of `spectrum`, in order.
    pub fn pair_sums(&self, spectrum: &Spectrum, x: &Point, y: &Point) -> Result<Vec<f64>> {
        match self {
            ManifoldModel::Torus(t) => {
                if x == y {
                    let v = t.volume();
                    return Ok(spectrum.levels.iter().map(|l| l.multiplicity as f64 / v).collect());
                }
                let d: Vec<f64> = x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect();
                spectrum.levels.iter().map(|l| t.pair_sum(l, &d)).collect()
            }
            ManifoldModel::Sphere(s) => {
                let Some(last) = spectrum.levels.last() else {
                    return Ok(Vec::new());
                };
                let PairData::Sphere(kmax) = last.pair_data else {
                    return Err(Error::domain("spectrum does not belong to a sphere"));
                };
                let z = s.zonal(kmax, sphere::cos_angle(&x.0, &y.0));
                let v = s.volume();
                spectrum
                    .levels
                    .iter()
                    .map(|l| match l.pair_data {
                        PairData::Sphere(k) if k <= kmax => Ok(l.multiplicity as f64 / v * z[k as usize]),
                        _ => Err(Error::domain("spectrum does not belong to a sphere")),
                    })
                    .collect()
            }
        }
    }
}

/// Sign of the sectional curvature of a constant-curvature space form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureSign {
    Negative,
    Flat,
    Positive,
}

/// Jacobian density g of the exponential map at distance r in curvature ±K².
pub fn g_density(sign: CurvatureSign, k: f64, n: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("g_density needs r > 0"));
    }
    if n < 1 {
        return Err(Error::domain("dimension must be positive"));
    }
    let e = (n - 1) as i32;
    match sign {
        CurvatureSign::Flat => Ok(1.0),
        CurvatureSign::Negative => Ok(sinhc(k * r).powi(e)),
        CurvatureSign::Positive => {
            if k * r >= std::f64::consts::PI {
                return Err(Error::domain(format!(
                    "r = {r} reaches the conjugate point π/K = {}",
                    std::f64::consts::PI / k
                )));
            }
            Ok(sinc(k * r).powi(e))
        }
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
