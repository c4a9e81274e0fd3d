//! Entangled phase-space states in a truncated two-mode Fock space.
//!
//! The crate builds the four-parameter entangled Gaussian ket `|Γ⟩` labelled
//! by two complex numbers `(σ, τ)`, evaluates its closed-form overlaps,
//! Wigner function, marginals and moments, and checks each of them against
//! truncated operator algebra and complex-plane quadrature.

pub mod analytic;
pub mod error;
pub mod fockspace;
pub mod params;
pub mod phasespace;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use params::{husimi_params, validate_params, EtaLabel, GammaLabel, PhasePoint, RepParams, XiLabel};
