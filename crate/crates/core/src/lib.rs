//! Spectral functions of the Laplacian on model manifolds: exact spectra,
//! counting functions and remainders, smoothed wave transforms, heat traces,
//! hyperbolic orbit sums and Diophantine alignment.

pub mod counting;
pub mod diophantine;
pub mod error;
pub mod fit;
pub mod heat;
pub mod hyperbolic;
pub mod models;
pub mod quad;
pub mod smoothing;

pub use error::{Error, Result};
pub use models::{
    g_density, CurvatureSign, LatticeTorus, ManifoldModel, ModelSpec, Point, SpectralLevel, Spectrum,
    SphereModel,
};
