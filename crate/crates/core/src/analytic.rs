//! Closed-form overlaps, Wigner functions, marginal kernels and moments of
//! the entangled state `|Γ⟩`.
//!
//! Throughout, `a = αδ/(βγ)` and `b = βγ/(αδ)` are the (negative) Gaussian
//! coefficients of the `ρ` and `ς` directions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{EtaLabel, GammaLabel, PhasePoint, RepParams, XiLabel};

/// Bound on the imaginary part discarded when a real result is computed
/// through complex intermediates.
pub const IMAGINARY_RESIDUE: f64 = 1e-12;

fn real_part(z: Complex64) -> Result<f64> {
    let scale = z.re.abs().max(1.0);
    if z.im.abs() > IMAGINARY_RESIDUE * scale {
        return Err(Error::ImaginaryResidue(z.im.abs()));
    }
    Ok(z.re)
}

/// `∫ d²z/π exp(ζ|z|² + ξz + ηz*) = -(1/ζ) exp(-ξη/ζ)` for `Re ζ < 0`.
pub fn complex_gaussian_integral(zeta: Complex64, xi: Complex64, eta: Complex64) -> Result<Complex64> {
    if !(zeta.re < 0.0) {
        return Err(Error::Domain(format!("Gaussian integral diverges for Re(zeta) = {} >= 0", zeta.re)));
    }
    Ok(-(-xi * eta / zeta).exp() / zeta)
}

/// `⟨Γ|z1, z2⟩` for the two-mode coherent state `|z1, z2⟩`.
pub fn gamma_coherent_overlap(label: &GammaLabel, p: &RepParams, z1: Complex64, z2: Complex64) -> Complex64 {
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    let (s, t) = (label.sigma, label.tau);
    let exponent = -0.5 * (z1.norm_sqr() + z2.norm_sqr()) + al * s.norm_sqr() / (2.0 * de) - ga * t.norm_sqr() / (2.0 * be)
        + (al * s.conj() + ga * t.conj()) * z1
        + (ga * t - al * s) * z2
        - p.pair_sum() * z1 * z2;
    2.0 * p.neg_product().sqrt() * exponent.exp()
}

/// `⟨Γ(σ,τ)|Γ(σ',τ')⟩`.
pub fn gamma_gamma_inner(l: &GammaLabel, lp: &GammaLabel, p: &RepParams) -> Complex64 {
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    let (s, t, s2, t2) = (l.sigma, l.tau, lp.sigma, lp.tau);
    let c = |z: Complex64| z.conj();
    let exponent = al / (4.0 * be * ga * de) * (s - s2).norm_sqr()
        - (t2 * c(s) - s * c(t2) + s2 * c(t) - t * c(s2)) / (4.0 * be * de)
        + ga / (4.0 * al * be * de) * (t - t2).norm_sqr()
        - p.pair_sum() / (4.0 * be * de) * (t2 * c(s2) - s2 * c(t2) + s * c(t) - t * c(s));
    exponent.exp()
}

/// `⟨η|Γ⟩`.
pub fn eta_gamma_overlap(eta: &EtaLabel, l: &GammaLabel, p: &RepParams) -> Complex64 {
    let (al, be, de) = (p.alpha(), p.beta(), p.delta());
    let (e, s, t) = (eta.0, l.sigma, l.tau);
    let a = p.rho_coefficient();
    let exponent = 0.5 * a * (s / de + e).norm_sqr() + (t * (e.conj() - al * s.conj()) - t.conj() * (e - al * s)) / (2.0 * be);
    (-a).sqrt() * exponent.exp()
}

/// `⟨ξ|Γ⟩`.
pub fn xi_gamma_overlap(xi: &XiLabel, l: &GammaLabel, p: &RepParams) -> Complex64 {
    let (be, ga, de) = (p.beta(), p.gamma(), p.delta());
    let (x, s, t) = (xi.0, l.sigma, l.tau);
    let b = p.varsigma_coefficient();
    let exponent = 0.5 * b * (t / be - x).norm_sqr() - (s * (x.conj() - ga * t.conj()) - s.conj() * (x - ga * t)) / (2.0 * de);
    (-b).sqrt() * exponent.exp()
}

/// `⟨ξ|η⟩ = (1/2) exp((ξ*η - ξη*)/2)`, of modulus exactly 1/2.
pub fn eta_xi_overlap(xi: &XiLabel, eta: &EtaLabel) -> Complex64 {
    let (x, e) = (xi.0, eta.0);
    // ξ*η - ξη* = 2i Im(ξ*η)
    let phase = (x.conj() * e).im;
    Complex64::from_polar(0.5, phase)
}

/// Wigner function of `|Γ⟩` at `(ρ, ς)`.
pub fn gamma_wigner(point: &PhasePoint, l: &GammaLabel, p: &RepParams) -> f64 {
    let (be, de) = (p.beta(), p.delta());
    let dr = point.rho + l.sigma / de;
    let dv = point.varsigma - l.tau / be;
    (p.rho_coefficient() * dr.norm_sqr() + p.varsigma_coefficient() * dv.norm_sqr()).exp() / (PI * PI)
}

/// Weyl symbol `h(ρ, ς)` of `|Γ⟩⟨Γ|`, so that `|Γ⟩⟨Γ| = ∫d²ρd²ς h Δ_w`. The factor 4 in front of the
/// exponential is part of `h`.
pub fn weyl_symbol_h(point: &PhasePoint, l: &GammaLabel, p: &RepParams) -> Result<f64> {
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    let u = l.sigma / de + point.rho;
    let v = l.tau / be - point.varsigma;
    let exponent = al * de / (be * ga) * u * u.conj() + be * ga / (al * de) * v * v.conj();
    real_part(4.0 * exponent.exp())
}

/// `exp(-κ|ρ-σ|² - |ς-τ|²/κ)`, the smoothing kernel of the Husimi family.
pub fn husimi_kernel(point: &PhasePoint, l: &GammaLabel, kappa: f64) -> f64 {
    (-kappa * (point.rho - l.sigma).norm_sqr() - (point.varsigma - l.tau).norm_sqr() / kappa).exp()
}

/// Wigner function of `|Γ⟩` at `(α, β, γ, δ) = (1/2, 1, 1/2, -1)`, where
/// `|Γ⟩` is a two-mode coherent state: `(1/π²) exp(-|ρ-σ|² - |ς-τ|²)`.
pub fn canonical_gamma_wigner(point: &PhasePoint, l: &GammaLabel) -> f64 {
    (-(point.rho - l.sigma).norm_sqr() - (point.varsigma - l.tau).norm_sqr()).exp() / (PI * PI)
}

/// Wigner function of the coherent state `|z1, z2⟩`.
pub fn coherent_wigner(point: &PhasePoint, z1: Complex64, z2: Complex64) -> f64 {
    let rc = z1 - z2.conj();
    let vc = z1 + z2.conj();
    (-(point.rho - rc).norm_sqr() - (point.varsigma - vc).norm_sqr()).exp() / (PI * PI)
}

/// Smoothing kernel of the `η`-direction marginal, `∫d²τ/π |Γ⟩⟨Γ|`.
pub fn marginal_kernel_eta(eta_value: Complex64, l: &GammaLabel, p: &RepParams) -> f64 {
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    -(4.0 * al * be * de / ga) * (p.rho_coefficient() * (l.sigma / de + eta_value).norm_sqr()).exp()
}

/// Smoothing kernel of the `ξ`-direction marginal, `∫d²σ/π |Γ⟩⟨Γ|`.
pub fn marginal_kernel_xi(xi_value: Complex64, l: &GammaLabel, p: &RepParams) -> f64 {
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    -(4.0 * be * ga * de / al) * (p.varsigma_coefficient() * (l.tau / be - xi_value).norm_sqr()).exp()
}

/// `⟨00| ∫d²σ/π |Γ⟩⟨Γ| |00⟩`, from the kernel and `|⟨ξ|00⟩|² = e^{-|ξ|²}`.
pub fn vacuum_marginal_xi(l: &GammaLabel, p: &RepParams) -> Result<f64> {
    // ∫d²ξ/π exp(b|ξ - ξ0|² - |ξ|²)
    let b = p.varsigma_coefficient();
    let x0 = l.tau / p.beta();
    let i = complex_gaussian_integral(Complex64::new(b - 1.0, 0.0), -b * x0.conj(), -b * x0)? * (b * x0.norm_sqr()).exp();
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    real_part(-(4.0 * be * ga * de / al) * i)
}

/// `⟨00| ∫d²τ/π |Γ⟩⟨Γ| |00⟩`, from the kernel and `|⟨η|00⟩|² = e^{-|η|²}`.
pub fn vacuum_marginal_eta(l: &GammaLabel, p: &RepParams) -> Result<f64> {
    let a = p.rho_coefficient();
    let e0 = -l.sigma / p.delta();
    let i = complex_gaussian_integral(Complex64::new(a - 1.0, 0.0), -a * e0.conj(), -a * e0)? * (a * e0.norm_sqr()).exp();
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    real_part(-(4.0 * al * be * de / ga) * i)
}

/// `∫d²ρ d²ς h(ρ,ς) W_z(ρ,ς)` with `W_z` the coherent-state Wigner function;
/// equals `|⟨Γ|z1,z2⟩|²`.
pub fn weyl_coherent_trace(l: &GammaLabel, p: &RepParams, z1: Complex64, z2: Complex64) -> Result<f64> {
    // each plane: ∫d²x exp(c|x - x0|² - |x - xc|²) = π · CGI · exp(c|x0|² - |xc|²)
    let plane = |c: f64, x0: Complex64, xc: Complex64| -> Result<Complex64> {
        let g = complex_gaussian_integral(Complex64::new(c - 1.0, 0.0), xc.conj() - c * x0.conj(), xc - c * x0)?;
        Ok(PI * g * (c * x0.norm_sqr() - xc.norm_sqr()).exp())
    };
    let r = plane(p.rho_coefficient(), -l.sigma / p.delta(), z1 - z2.conj())?;
    let v = plane(p.varsigma_coefficient(), l.tau / p.beta(), z1 + z2.conj())?;
    // 4 from h, 1/π² from W
    real_part(4.0 * r * v / (PI * PI))
}

/// First and second moments of the collective quadratures
/// `Q± = (Q1 ± Q2)/√2`, `P± = (P1 ± P2)/√2` in `|Γ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub mean_q_minus: f64,
    pub mean_q_plus: f64,
    pub mean_p_minus: f64,
    pub mean_p_plus: f64,
    pub mean_q_minus_sq: f64,
    pub mean_q_plus_sq: f64,
    pub mean_p_minus_sq: f64,
    pub mean_p_plus_sq: f64,
}

impl MomentSet {
    pub fn var_q_minus(&self) -> f64 {
        self.mean_q_minus_sq - self.mean_q_minus * self.mean_q_minus
    }

    pub fn var_q_plus(&self) -> f64 {
        self.mean_q_plus_sq - self.mean_q_plus * self.mean_q_plus
    }

    pub fn var_p_minus(&self) -> f64 {
        self.mean_p_minus_sq - self.mean_p_minus * self.mean_p_minus
    }

    pub fn var_p_plus(&self) -> f64 {
        self.mean_p_plus_sq - self.mean_p_plus * self.mean_p_plus
    }

    /// `(ΔQ-² ΔP-², ΔQ+² ΔP+²)`.
    pub fn uncertainty_products(&self) -> (f64, f64) {
        (self.var_q_minus() * self.var_p_minus(), self.var_q_plus() * self.var_p_plus())
    }
}

/// Closed-form moments. The `-` pair reads off the `η` representation, the
/// `+` pair the `ξ` representation.
pub fn gamma_moments(l: &GammaLabel, p: &RepParams) -> MomentSet {
    let (be, de) = (p.beta(), p.delta());
    let (s, t) = (l.sigma, l.tau);
    // variances: -βγ/(2αδ) for Q- and P+, -αδ/(2βγ) for P- and Q+
    let vq = -0.5 * p.varsigma_coefficient();
    let vp = -0.5 * p.rho_coefficient();
    let qm = -s.re / de;
    let pm = t.im / be;
    let qp = t.re / be;
    let pp = -s.im / de;
    MomentSet {
        mean_q_minus: qm,
        mean_q_plus: qp,
        mean_p_minus: pm,
        mean_p_plus: pp,
        mean_q_minus_sq: qm * qm + vq,
        mean_q_plus_sq: qp * qp + vp,
        mean_p_minus_sq: pm * pm + vp,
        mean_p_plus_sq: pp * pp + vq,
    }
}
