use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured cap (enumeration size, spectrum range) would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// An explicit spectrum cutoff is too low for the requested evaluation.
    #[error("spectrum too short: need lambda_max >= {needed}, have {available}")]
    SpectrumRange { needed: f64, available: f64 },

    /// Heat evaluation at a time too small for the available spectrum.
    #[error("t = {t} below the admissible minimum {min_t} for the available spectrum")]
    HeatTime { t: f64, min_t: f64 },

    #[error("numerical failure: {message} (achieved {achieved:e})")]
    Numeric { message: String, achieved: f64 },

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Model or preset input failed validation.
    #[error("invalid model: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, achieved: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            achieved,
        }
    }

    /// True for the resource-style failures (caps, spectrum range, heat time).
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Resource(_) | Error::SpectrumRange { .. } | Error::HeatTime { .. }
        )
    }
}
