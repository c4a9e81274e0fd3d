//! Representation parameters and state labels.
//!
//! Every formula in the crate reads the four real parameters through
//! [`RepParams`], which can only be obtained through [`validate_params`] or
//! [`husimi_params`]. Once validated, divisions by any of the four are safe.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `beta*gamma - alpha*delta = 1`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

/// The four real parameters `(alpha, beta, gamma, delta)` of the entangled
/// representation, with `beta*gamma - alpha*delta = 1`, `alpha/delta < 0` and
/// `gamma/beta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

/// Checks the constraint and sign conditions. Never renormalizes.
pub fn validate_params(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<RepParams> {
    if ![alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("representation parameters"));
    }
    if alpha == 0.0 || delta == 0.0 || alpha / delta >= 0.0 {
        return Err(Error::SignViolation("alpha/delta must be strictly negative"));
    }
    if gamma == 0.0 || beta == 0.0 || gamma / beta <= 0.0 {
        return Err(Error::SignViolation("gamma/beta must be strictly positive"));
    }
    let value = beta * gamma - alpha * delta;
    if (value - 1.0).abs() > CONSTRAINT_TOLERANCE {
        return Err(Error::ConstraintViolation { value });
    }
    Ok(RepParams { alpha, beta, gamma, delta })
}

/// The one-parameter Husimi family `alpha = k/(1+k)`, `beta = 1`,
/// `gamma = 1/(1+k)`, `delta = -1`.
pub fn husimi_params(kappa: f64) -> Result<RepParams> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::Domain(format!("kappa must be finite and positive, got {kappa}")));
    }
    validate_params(kappa / (1.0 + kappa), 1.0, 1.0 / (1.0 + kappa), -1.0)
}

impl RepParams {
    /// `(0.5, 1, 0.5, -1)`: the member of the family for which `|Γ⟩` is a
    /// plain two-mode coherent state.
    pub fn canonical() -> Self {
        RepParams { alpha: 0.5, beta: 1.0, gamma: 0.5, delta: -1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `-alpha*beta*gamma*delta`, strictly positive for validated parameters.
    pub fn neg_product(&self) -> f64 {
        -self.alpha * self.beta * self.gamma * self.delta
    }

    /// `beta*gamma + alpha*delta`; minus the two-mode pair amplitude of `|Γ⟩`.
    pub fn pair_sum(&self) -> f64 {
        self.beta * self.gamma + self.alpha * self.delta
    }

    /// `beta*gamma - alpha*delta`, equal to one up to the construction tolerance.
    pub fn constraint_value(&self) -> f64 {
        self.beta * self.gamma - self.alpha * self.delta
    }

    /// Gaussian coefficient `alpha*delta/(beta*gamma)` of the `rho` (and `eta`)
    /// direction. Negative.
    pub fn rho_coefficient(&self) -> f64 {
        self.alpha * self.delta / (self.beta * self.gamma)
    }

    /// Gaussian coefficient `beta*gamma/(alpha*delta)` of the `varsigma` (and
    /// `xi`) direction. Negative.
    pub fn varsigma_coefficient(&self) -> f64 {
        self.beta * self.gamma / (self.alpha * self.delta)
    }

    /// The Husimi parameter `kappa = alpha/gamma` when `beta = -delta = 1`.
    pub fn husimi_kappa(&self) -> Option<f64> {
        let on_family = (self.beta - 1.0).abs() <= CONSTRAINT_TOLERANCE
            && (self.delta + 1.0).abs() <= CONSTRAINT_TOLERANCE;
        on_family.then(|| self.alpha / self.gamma)
    }
}

impl<'de> Deserialize<'de> for RepParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            alpha: f64,
            beta: f64,
            gamma: f64,
            delta: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        validate_params(raw.alpha, raw.beta, raw.gamma, raw.delta).map_err(serde::de::Error::custom)
    }
}

fn finite(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Label `(sigma, tau)` of the entangled state `|Γ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLabel {
    pub sigma: Complex64,
    pub tau: Complex64,
}

impl GammaLabel {
    pub fn new(sigma: Complex64, tau: Complex64) -> Result<Self> {
        Ok(GammaLabel { sigma: finite(sigma, "sigma")?, tau: finite(tau, "tau")? })
    }

    pub fn origin() -> Self {
        GammaLabel { sigma: Complex64::new(0.0, 0.0), tau: Complex64::new(0.0, 0.0) }
    }
}

/// Eigenvalue label of `|η⟩`, the common eigenvector of `Q1 - Q2` and `P1 + P2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaLabel(pub Complex64);

impl EtaLabel {
    pub fn new(value: Complex64) -> Result<Self> {
        finite(value, "eta").map(EtaLabel)
    }
}

/// Eigenvalue label of `|ξ⟩`, the common eigenvector of `Q1 + Q2` and `P1 - P2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiLabel(pub Complex64);

impl XiLabel {
    pub fn new(value: Complex64) -> Result<Self> {
        finite(value, "xi").map(XiLabel)
    }
}

/// A point `(rho, varsigma)` of the entangled phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub rho: Complex64,
    pub varsigma: Complex64,
}

impl PhasePoint {
    pub fn new(rho: Complex64, varsigma: Complex64) -> Result<Self> {
        Ok(PhasePoint { rho: finite(rho, "rho")?, varsigma: finite(varsigma, "varsigma")? })
    }
}
