//! TOML run configuration. Command-line flags override these values.

use serde::Deserialize;
use weyllab_core::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub psi: PsiConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub tail: TailConfig,
    #[serde(default, rename = "Q")]
    pub q: QConfig,
    pub threads: Option<usize>,
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiConfig {
    pub s_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QConfig {
    pub n2: Option<f64>,
    pub n3: Option<f64>,
}

impl QConfig {
    pub fn get(&self, n: usize) -> Option<f64> {
        match n {
            2 => self.n2,
            3 => self.n3,
            _ => None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let c: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Config(format!("{name} must be positive"))),
            _ => Ok(()),
        };
        positive("psi.s_max", self.psi.s_max)?;
        positive("quad.tol", self.quad.tol)?;
        positive("tail.tol", self.tail.tol)?;
        if matches!(self.threads, Some(0)) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if matches!(self.cap, Some(0)) {
            return Err(Error::Config("cap must be at least 1".into()));
        }
        Ok(())
    }
}
