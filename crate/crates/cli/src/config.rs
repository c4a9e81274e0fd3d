//! JSON run configuration.

use std::path::{Path, PathBuf};

use entps::verify::Tier;
use entps::{husimi_params, validate_params, RepParams};
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub order2d: Option<usize>,
    pub order4d: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Contents of a `--config` file. Every key is optional; flags take
/// precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<RawParams>,
    pub kappa: Option<f64>,
    pub sigma: Option<[f64; 2]>,
    pub tau: Option<[f64; 2]>,
    pub cutoff: Option<usize>,
    pub tier: Option<Tier>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            if key == "." {
                CliError::Invalid(format!("config: {}", e.inner()))
            } else {
                CliError::Invalid(format!("config key `{key}`: {}", e.inner()))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.params.is_some() && self.kappa.is_some() {
            return Err(CliError::Invalid("config keys `params` and `kappa` are mutually exclusive".into()));
        }
        self.params().map(|_| ())
    }

    /// Parameters given by the `params` or `kappa` key, validated.
    pub fn params(&self) -> Result<Option<RepParams>, CliError> {
        if let Some(r) = self.params {
            return validate_params(r.alpha, r.beta, r.gamma, r.delta)
                .map(Some)
                .map_err(|e| CliError::Invalid(format!("config key `params`: {e}")));
        }
        if let Some(k) = self.kappa {
            return husimi_params(k).map(Some).map_err(|e| CliError::Invalid(format!("config key `kappa`: {e}")));
        }
        Ok(None)
    }

    pub fn sigma(&self) -> Option<Complex64> {
        self.sigma.map(|[re, im]| Complex64::new(re, im))
    }

    pub fn tau(&self) -> Option<Complex64> {
        self.tau.map(|[re, im]| Complex64::new(re, im))
    }
}
