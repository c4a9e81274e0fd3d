use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::sampling::{self, disk};
use super::CheckReport;
use crate::analytic::{
    canonical_gamma_wigner, coherent_wigner, eta_gamma_overlap, eta_xi_overlap, gamma_coherent_overlap, gamma_gamma_inner,
    gamma_moments, gamma_wigner, husimi_kernel, marginal_kernel_eta, marginal_kernel_xi, vacuum_marginal_eta,
    vacuum_marginal_xi, weyl_coherent_trace, weyl_symbol_h, xi_gamma_overlap,
};
use crate::error::{Error, Result};
use crate::fockspace::normal::normally_ordered_gaussian_matrix_general;
use crate::fockspace::{
    apply_collective, apply_ladder, coherent_state, eta_state, gamma_state, inner, resummed_inner, squeeze_operator_matrix,
    squeezed_vacuum, xi_state, Collective, Ladder, Mode, OperatorMatrix, TwoModeState,
};
use crate::params::{husimi_params, EtaLabel, GammaLabel, PhasePoint, RepParams, XiLabel};
use crate::phasespace::{
    factorized_wigner_matrix, gamma_projector, project_out_rho, project_out_varsigma, smoothed_projector, smoothing_rules,
    squeeze_integral, squeeze_rule, wigner_numeric_row, wigner_rule, wigner_symbol,
};
use crate::quadrature::{fold_range, gauss_hermite_plane, PlaneRule};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn guard(name: &str, anchor: &str, tolerance: f64, cutoff: usize, f: impl FnOnce() -> Result<CheckReport>) -> CheckReport {
    f().unwrap_or_else(|e| CheckReport::errored(name, anchor, tolerance, cutoff, &e))
}

fn relative(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}

const PARAMS_ANCHOR: &str = "βγ - αδ = 1 on the Husimi family";
// a few ulps of a sum of two terms in (0, 1)
const PARAMS_TOL: f64 = 1e-15;

/// The constraint `βγ - αδ = 1` for `draws` Husimi parameters with
/// `ln κ` uniform in `[-5, 5]`.
pub fn check_params(draws: usize, seed: u64) -> CheckReport {
    guard("params", PARAMS_ANCHOR, PARAMS_TOL, 0, || {
        let mut rng = sampling::rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..draws {
            let kappa = rng.gen_range(-5.0f64..5.0).exp();
            let p = husimi_params(kappa)?;
            worst = worst.max((p.constraint_value() - 1.0).abs());
        }
        Ok(CheckReport::new("params", PARAMS_ANCHOR, worst, PARAMS_TOL, 0, &[("draws", draws as f64)]))
    })
}

const NORM_ANCHOR: &str = "⟨Γ|Γ⟩ = 1";
// truncation tail at cutoff 25 for labels in the unit disk is below 1e-10
const NORM_TOL: f64 = 1e-8;

/// `⟨Γ|Γ⟩ = 1` from truncated Fock coefficients for random labels.
pub fn check_normalization(p: &RepParams, cutoff: usize, draws: usize, seed: u64) -> CheckReport {
    guard("normalization", NORM_ANCHOR, NORM_TOL, cutoff, || {
        let mut rng = sampling::rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..draws {
            let g = gamma_state(&sampling::label(&mut rng), p, cutoff)?;
            worst = worst.max((inner(&g, &g)? - 1.0).norm());
        }
        Ok(CheckReport::new("normalization", NORM_ANCHOR, worst, NORM_TOL, cutoff, &[("draws", draws as f64)]))
    })
}

const INNER_ANCHOR: &str = "closed-form ⟨Γ(σ,τ)|Γ(σ',τ')⟩";
const INNER_TOL: f64 = 1e-7;

/// Closed-form `⟨Γ|Γ'⟩` against the truncated Fock inner product
/// (relative error).
pub fn check_inner_product(p: &RepParams, cutoff: usize, draws: usize, seed: u64) -> CheckReport {
    guard("inner_product", INNER_ANCHOR, INNER_TOL, cutoff, || {
        let mut rng = sampling::rng(seed ^ 0x11);
        let mut worst: f64 = 0.0;
        for _ in 0..draws {
            let (l, lp) = (sampling::label(&mut rng), sampling::label(&mut rng));
            let fock = inner(&gamma_state(&l, p, cutoff)?, &gamma_state(&lp, p, cutoff)?)?;
            worst = worst.max(relative(fock, gamma_gamma_inner(&l, &lp, p)));
        }
        Ok(CheckReport::new("inner_product", INNER_ANCHOR, worst, INNER_TOL, cutoff, &[("draws", draws as f64)]))
    })
}

const OVERLAP_ANCHOR: &str = "closed-form overlaps ⟨Γ|z⟩, ⟨η|Γ⟩, ⟨ξ|Γ⟩, ⟨ξ|η⟩";
// truncation tail at cutoff 30, measured by a cutoff sweep
const OVERLAP_TOL: f64 = 1e-7;

/// Closed-form overlaps against truncated Fock inner products, worst relative
/// error. `⟨ξ|η⟩` uses [`resummed_inner`] since its plain truncation does
/// not converge.
pub fn check_overlaps(p: &RepParams, cutoff: usize, draws: usize, seed: u64) -> CheckReport {
    guard("overlaps", OVERLAP_ANCHOR, OVERLAP_TOL, cutoff, || {
        let mut rng = sampling::rng(seed ^ 0x22);
        let (mut coh, mut eta, mut xi, mut xe, mut modulus) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..draws {
            let l = sampling::label(&mut rng);
            let (z1, z2) = (disk(&mut rng, 1.0), disk(&mut rng, 1.0));
            let e = EtaLabel(disk(&mut rng, 1.0));
            let x = XiLabel(disk(&mut rng, 1.0));
            let g = gamma_state(&l, p, cutoff)?;
            let es = eta_state(&e, cutoff)?;
            let xs = xi_state(&x, cutoff)?;
            coh = coh.max(relative(inner(&g, &coherent_state(z1, z2, cutoff)?)?, gamma_coherent_overlap(&l, p, z1, z2)));
            eta = eta.max(relative(inner(&es, &g)?, eta_gamma_overlap(&e, &l, p)));
            xi = xi.max(relative(inner(&xs, &g)?, xi_gamma_overlap(&x, &l, p)));
            let closed = eta_xi_overlap(&x, &e);
            xe = xe.max(relative(resummed_inner(&xs, &es)?, closed));
            modulus = modulus.max((closed.norm() - 0.5).abs());
        }
        let worst = coh.max(eta).max(xi).max(xe).max(modulus);
        Ok(CheckReport::new(
            "overlaps",
            OVERLAP_ANCHOR,
            worst,
            OVERLAP_TOL,
            cutoff,
            &[("coherent", coh), ("eta", eta), ("xi", xi), ("xi_eta", xe), ("xi_eta_modulus", modulus), ("draws", draws as f64)],
        ))
    })
}

const LADDER_ANCHOR: &str = "a1|Γ⟩ = [(ασ+γτ) - (βγ+αδ)a2†]|Γ⟩, a2|Γ⟩ = [(γτ*-ασ*) - (βγ+αδ)a1†]|Γ⟩";
// exact algebra, roundoff only
const LADDER_TOL: f64 = 1e-8;

/// Residual norms of both ladder relations on `n1, n2 <= cutoff - 4`.
pub fn check_ladder_relations(p: &RepParams, l: &GammaLabel, cutoff: usize) -> CheckReport {
    guard("ladder", LADDER_ANCHOR, LADDER_TOL, cutoff, || {
        if cutoff < 5 {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        let g = gamma_state(l, p, cutoff)?;
        let pair = c(p.pair_sum(), 0.0);
        let coeff1 = p.alpha() * l.sigma + p.gamma() * l.tau;
        let coeff2 = p.gamma() * l.tau.conj() - p.alpha() * l.sigma.conj();
        let block = cutoff - 4;
        let mut worst: f64 = 0.0;
        for (coeff, lowered, raised) in [(coeff1, Mode::One, Mode::Two), (coeff2, Mode::Two, Mode::One)] {
            let lhs = apply_ladder(&g, lowered, Ladder::Annihilate).state;
            let rhs = g.scaled(coeff).sub(&apply_ladder(&g, raised, Ladder::Create).state.scaled(pair))?;
            worst = worst.max(lhs.sub(&rhs)?.restricted(block).norm_sqr().sqrt());
        }
        Ok(CheckReport::new("ladder", LADDER_ANCHOR, worst, LADDER_TOL, cutoff, &[("block", block as f64)]))
    })
}

const EIGEN_ANCHOR: &str = "collective quadratures act on ⟨Γ| as first-order label derivatives";
// central differences with step 1e-4 are accurate to ~1e-8
const EIGEN_TOL: f64 = 1e-6;

/// Label direction of a finite difference.
#[derive(Debug, Clone, Copy)]
enum Direction {
    Sigma1,
    Sigma2,
    Tau1,
    Tau2,
}

/// Central difference of `σ,τ ↦ ⟨Γ(σ,τ)|ψ⟩`, refusing steps at which the
/// one-sided differences disagree by more than 10%.
fn label_derivative(p: &RepParams, l: &GammaLabel, psi: &TwoModeState, dir: Direction, step: f64) -> Result<Complex64> {
    let n = psi.cutoff();
    let at = |shift: f64| -> Result<Complex64> {
        let (ds, dt) = match dir {
            Direction::Sigma1 => (c(shift, 0.0), c(0.0, 0.0)),
            Direction::Sigma2 => (c(0.0, shift), c(0.0, 0.0)),
            Direction::Tau1 => (c(0.0, 0.0), c(shift, 0.0)),
            Direction::Tau2 => (c(0.0, 0.0), c(0.0, shift)),
        };
        let shifted = GammaLabel::new(l.sigma + ds, l.tau + dt)?;
        inner(&gamma_state(&shifted, p, n)?, psi)
    };
    let (fm, f0, fp) = (at(-step)?, at(0.0)?, at(step)?);
    let forward = (fp - f0) / step;
    let backward = (f0 - fm) / step;
    let scale = forward.norm().max(backward.norm()).max(f0.norm());
    if scale > 0.0 {
        let rel = (forward - backward).norm() / scale;
        if rel > 0.1 {
            return Err(Error::StepTooLarge { relative: rel });
        }
    }
    Ok((fp - fm) / (2.0 * step))
}

/// The four derivative relations
///
/// `⟨Γ|Q-  = (ασ1 + iβ∂τ2)⟨Γ|`, `⟨Γ|P-  = (γτ2 + iδ∂σ1)⟨Γ|`,
/// `⟨Γ|Q+  = (γτ1 - iδ∂σ2)⟨Γ|`, `⟨Γ|P+  = (ασ2 - iβ∂τ1)⟨Γ|`,
///
/// applied to `test_state`, with `Q± = (Q1 ± Q2)/√2` acting in the Fock
/// basis and the derivatives taken by central differences. Reports the worst
/// of the four.
pub fn check_eigen_relations(p: &RepParams, l: &GammaLabel, test_state: &TwoModeState, step: f64) -> Result<CheckReport> {
    let n = test_state.cutoff();
    if n < 5 || test_state.weight_outside(n - 4) > 0.0 {
        return Err(Error::Domain("test state must be supported on n1, n2 <= cutoff - 4".into()));
    }
    let g = gamma_state(l, p, n)?;
    let f = inner(&g, test_state)?;
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    let i = c(0.0, 1.0);
    let d = |dir| label_derivative(p, l, test_state, dir, step);
    let relations = [
        (Collective::QMinus, al * l.sigma.re * f + i * be * d(Direction::Tau2)?),
        (Collective::PMinus, ga * l.tau.im * f + i * de * d(Direction::Sigma1)?),
        (Collective::QPlus, ga * l.tau.re * f - i * de * d(Direction::Sigma2)?),
        (Collective::PPlus, al * l.sigma.im * f - i * be * d(Direction::Tau1)?),
    ];
    let mut worst: f64 = 0.0;
    for (op, rhs) in relations {
        let lhs = inner(&g, &apply_collective(test_state, op).state)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(CheckReport::new("eigen_relations", EIGEN_ANCHOR, worst, EIGEN_TOL, n, &[("step", step)]))
}

/// [`check_eigen_relations`] over the vacuum and three random test states
/// supported on `n <= 4`, at `l` and two random labels.
pub fn check_eigen_relations_suite(p: &RepParams, l: &GammaLabel, cutoff: usize, step: f64, seed: u64) -> CheckReport {
    guard("eigen_relations", EIGEN_ANCHOR, EIGEN_TOL, cutoff, || {
        let mut rng = sampling::rng(seed ^ 0x33);
        let mut states = vec![TwoModeState::vacuum(cutoff)?];
        for _ in 0..3 {
            states.push(sampling::interior_state(&mut rng, cutoff, 4.min(cutoff.saturating_sub(4))));
        }
        let labels = [*l, sampling::label(&mut rng), sampling::label(&mut rng)];
        let mut worst: f64 = 0.0;
        for psi in &states {
            for lab in &labels {
                worst = worst.max(check_eigen_relations(p, lab, psi, step)?.max_abs_error);
            }
        }
        let cases = (states.len() * labels.len()) as f64;
        Ok(CheckReport::new("eigen_relations", EIGEN_ANCHOR, worst, EIGEN_TOL, cutoff, &[("step", step), ("cases", cases)]))
    })
}

const COMMUTATOR_ANCHOR: &str = "⟨Γ|[Q±, P±]|ψ⟩ = i(βγ - αδ)⟨Γ|ψ⟩";
// exact on interior-supported states, roundoff only
const COMMUTATOR_TOL: f64 = 1e-8;

/// The canonical commutator of both collective pairs between `⟨Γ|` and test
/// states supported on `n <= cutoff - 4`, where truncation does not reach.
pub fn check_commutator(p: &RepParams, l: &GammaLabel, cutoff: usize, seed: u64) -> CheckReport {
    guard("commutator", COMMUTATOR_ANCHOR, COMMUTATOR_TOL, cutoff, || {
        if cutoff < 5 {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        let mut rng = sampling::rng(seed ^ 0x44);
        let mut states = vec![TwoModeState::vacuum(cutoff)?];
        for _ in 0..3 {
            states.push(sampling::interior_state(&mut rng, cutoff, cutoff - 4));
        }
        let g = gamma_state(l, p, cutoff)?;
        let want_factor = c(0.0, p.constraint_value());
        let mut worst: f64 = 0.0;
        for psi in &states {
            let base = inner(&g, psi)?;
            for (q, pp) in [(Collective::QMinus, Collective::PMinus), (Collective::QPlus, Collective::PPlus)] {
                let qp = apply_collective(&apply_collective(psi, pp).state, q).state;
                let pq = apply_collective(&apply_collective(psi, q).state, pp).state;
                let lhs = inner(&g, &qp.sub(&pq)?)?;
                worst = worst.max((lhs - want_factor * base).norm());
            }
        }
        Ok(CheckReport::new("commutator", COMMUTATOR_ANCHOR, worst, COMMUTATOR_TOL, cutoff, &[("states", states.len() as f64)]))
    })
}

const PRODUCT_ANCHOR: &str = "ΔQ-²ΔP-² = ΔQ+²ΔP+² = 1/4";
// a handful of ulps
const PRODUCT_TOL: f64 = 1e-14;

/// Closed-form variance products for `draws` random parameters and labels.
pub fn check_uncertainty_closed_form(draws: usize, seed: u64) -> CheckReport {
    let mut rng = sampling::rng(seed ^ 0x55);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let p = sampling::wide_params(&mut rng);
        let (a, b) = gamma_moments(&sampling::label(&mut rng), &p).uncertainty_products();
        worst = worst.max((a - 0.25).abs()).max((b - 0.25).abs());
    }
    CheckReport::new("uncertainty_closed_form", PRODUCT_ANCHOR, worst, PRODUCT_TOL, 0, &[("draws", draws as f64)])
}

const MOMENT_ANCHOR: &str = "collective quadrature moments from the |⟨η|Γ⟩|² and |⟨ξ|Γ⟩|² densities";
// quadrature is exact for the Gaussian densities; the residue is Fock truncation
const MOMENT_TOL: f64 = 1e-6;

/// `∫d²z/π (z1, z2, z1², z2²) |f(z)|²` on `rule`, with `f` the Fock overlap.
fn density_moments(rule: &PlaneRule, overlap: impl Fn(Complex64) -> Result<Complex64> + Sync) -> Result<[f64; 4]> {
    let w = rule.effective_weights(true);
    fold_range(
        rule.len(),
        crate::quadrature::CHUNK,
        || [0.0; 4],
        |acc, i| {
            let z = rule.nodes()[i];
            let d = w[i] * overlap(z)?.norm_sqr() / PI;
            acc[0] += d * z.re;
            acc[1] += d * z.im;
            acc[2] += d * z.re * z.re;
            acc[3] += d * z.im * z.im;
            Ok(())
        },
        |acc, p| acc.iter_mut().zip(p).for_each(|(a, b)| *a += b),
    )
}

/// Means and second moments of `Q±, P±` in `|Γ⟩` from Gauss–Hermite
/// quadrature over the `η` density (`Q-` from `η1`, `P+` from `η2`) and the
/// `ξ` density (`Q+` from `ξ1`, `P-` from `ξ2`), against the closed form.
pub fn check_uncertainty(p: &RepParams, l: &GammaLabel, cutoff: usize, order: usize) -> CheckReport {
    guard("uncertainty", MOMENT_ANCHOR, MOMENT_TOL, cutoff, || {
        let g = gamma_state(l, p, cutoff)?;
        let eta_rule = gauss_hermite_plane(order, (-1.0 / p.rho_coefficient()).sqrt())?.centered(-l.sigma / p.delta());
        let xi_rule = gauss_hermite_plane(order, (-1.0 / p.varsigma_coefficient()).sqrt())?.centered(l.tau / p.beta());
        let e = density_moments(&eta_rule, |z| inner(&eta_state(&EtaLabel(z), cutoff)?, &g))?;
        let x = density_moments(&xi_rule, |z| inner(&xi_state(&XiLabel(z), cutoff)?, &g))?;
        let m = gamma_moments(l, p);
        let pairs = [
            (e[0], m.mean_q_minus),
            (e[1], m.mean_p_plus),
            (e[2], m.mean_q_minus_sq),
            (e[3], m.mean_p_plus_sq),
            (x[0], m.mean_q_plus),
            (x[1], m.mean_p_minus),
            (x[2], m.mean_q_plus_sq),
            (x[3], m.mean_p_minus_sq),
        ];
        let worst = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let minus = (e[2] - e[0] * e[0]) * (x[3] - x[1] * x[1]);
        let plus = (x[2] - x[0] * x[0]) * (e[3] - e[1] * e[1]);
        Ok(CheckReport::new(
            "uncertainty",
            MOMENT_ANCHOR,
            worst,
            MOMENT_TOL,
            cutoff,
            &[("order", order as f64), ("product_minus", minus), ("product_plus", plus)],
        ))
    })
}

const MARGINAL_ANCHOR: &str = "∫d²σ/π |Γ⟩⟨Γ| and ∫d²τ/π |Γ⟩⟨Γ| as Gaussian-broadened EPR densities";
// Gauss-Hermite with matched widths plus cutoff-30 truncation
const MARGINAL_TOL: f64 = 1e-5;

/// The two marginal identities in a state `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalValues {
    /// `⟨ψ|∫d²σ/π |Γ⟩⟨Γ| |ψ⟩` by quadrature over `σ`.
    pub sigma_integral: f64,
    /// `∫d²ξ/π |⟨ξ|ψ⟩|² K_ξ(ξ)` by quadrature over `ξ`.
    pub xi_convolution: f64,
    /// `⟨ψ|∫d²τ/π |Γ⟩⟨Γ| |ψ⟩` by quadrature over `τ`.
    pub tau_integral: f64,
    /// `∫d²η/π |⟨η|ψ⟩|² K_η(η)` by quadrature over `η`.
    pub eta_convolution: f64,
}

fn integrate_real(rule: &PlaneRule, f: impl Fn(Complex64) -> Result<f64> + Sync) -> Result<f64> {
    let w = rule.effective_weights(true);
    fold_range(rule.len(), crate::quadrature::CHUNK, || 0.0, |acc, i| {
        *acc += w[i] * f(rule.nodes()[i])?;
        Ok(())
    }, |acc, p| *acc += p)
}

/// Both sides of both marginal identities for `psi`, every integral by
/// quadrature on Fock overlaps.
pub fn marginal_values(p: &RepParams, l: &GammaLabel, psi: &TwoModeState, order: usize) -> Result<MarginalValues> {
    let n = psi.cutoff();
    let (a, b) = (p.rho_coefficient(), p.varsigma_coefficient());
    let sigma_rule = gauss_hermite_plane(order, (-p.delta() / p.alpha()).sqrt())?;
    let tau_rule = gauss_hermite_plane(order, (p.beta() / p.gamma()).sqrt())?;
    let x0 = l.tau / p.beta();
    let xi_rule = gauss_hermite_plane(order, (1.0 / (1.0 - b)).sqrt())?.centered(b * x0 / (b - 1.0));
    let e0 = -l.sigma / p.delta();
    let eta_rule = gauss_hermite_plane(order, (1.0 / (1.0 - a)).sqrt())?.centered(a * e0 / (a - 1.0));
    let gamma_weight = |s: Complex64, t: Complex64| -> Result<f64> {
        Ok(inner(&gamma_state(&GammaLabel::new(s, t)?, p, n)?, psi)?.norm_sqr() / PI)
    };
    Ok(MarginalValues {
        sigma_integral: integrate_real(&sigma_rule, |s| gamma_weight(s, l.tau))?,
        xi_convolution: integrate_real(&xi_rule, |x| {
            Ok(inner(&xi_state(&XiLabel(x), n)?, psi)?.norm_sqr() / PI * marginal_kernel_xi(x, l, p))
        })?,
        tau_integral: integrate_real(&tau_rule, |t| gamma_weight(l.sigma, t))?,
        eta_convolution: integrate_real(&eta_rule, |e| {
            Ok(inner(&eta_state(&EtaLabel(e), n)?, psi)?.norm_sqr() / PI * marginal_kernel_eta(e, l, p))
        })?,
    })
}

/// Three-way agreement for `ψ = |00⟩` (label quadrature, EPR quadrature,
/// closed form) and two-way agreement for `ψ = |0.5, -0.3i⟩`.
pub fn check_marginals_suite(p: &RepParams, l: &GammaLabel, cutoff: usize, order: usize) -> CheckReport {
    guard("marginals", MARGINAL_ANCHOR, MARGINAL_TOL, cutoff, || {
        let vac = marginal_values(p, l, &TwoModeState::vacuum(cutoff)?, order)?;
        let closed_xi = vacuum_marginal_xi(l, p)?;
        let closed_eta = vacuum_marginal_eta(l, p)?;
        let coh = marginal_values(p, l, &coherent_state(c(0.5, 0.0), c(0.0, -0.3), cutoff)?, order)?;
        let errs = [
            (vac.sigma_integral - vac.xi_convolution).abs(),
            (vac.sigma_integral - closed_xi).abs(),
            (vac.xi_convolution - closed_xi).abs(),
            (vac.tau_integral - vac.eta_convolution).abs(),
            (vac.tau_integral - closed_eta).abs(),
            (vac.eta_convolution - closed_eta).abs(),
            (coh.sigma_integral - coh.xi_convolution).abs(),
            (coh.tau_integral - coh.eta_convolution).abs(),
        ];
        let worst = errs.iter().copied().fold(0.0, f64::max);
        Ok(CheckReport::new(
            "marginals",
            MARGINAL_ANCHOR,
            worst,
            MARGINAL_TOL,
            cutoff,
            &[("order", order as f64), ("vacuum_xi_closed_form", closed_xi), ("vacuum_eta_closed_form", closed_eta)],
        ))
    })
}

const FACTOR_ANCHOR: &str = "Δ_w(ρ,ς) = Δ(ᾱ) ⊗ Δ(β̄) with ς = ᾱ + β̄*, ρ = ᾱ - β̄*";
// both sides are exact series; roundoff only
const FACTOR_TOL: f64 = 1e-8;

/// The coupled normal-ordering path for `Δ_w` against the tensor product of
/// single-mode Wigner operators, on the whole truncated block.
pub fn check_factorization(points: &[PhasePoint], cutoff: usize) -> CheckReport {
    guard("factorization", FACTOR_ANCHOR, FACTOR_TOL, cutoff, || {
        let (mut worst, mut herm) = (0.0f64, 0.0f64);
        for pt in points {
            let general = normally_ordered_gaussian_matrix_general(&wigner_symbol(pt), cutoff)?;
            let product = factorized_wigner_matrix(pt, cutoff)?;
            worst = worst.max(general.max_abs_diff_on_block(&product, cutoff));
            herm = herm.max(general.max_antihermitian()).max(product.max_antihermitian());
        }
        Ok(CheckReport::new(
            "factorization",
            FACTOR_ANCHOR,
            worst.max(herm),
            FACTOR_TOL,
            cutoff,
            &[("points", points.len() as f64), ("max_antihermitian", herm)],
        ))
    })
}

const SPECIAL_ANCHOR: &str = "Wigner peak 1/π², canonical and Husimi specializations of W and h";
const SPECIAL_TOL: f64 = 1e-12;

/// Closed-form consistency: the peak of `W` is `1/π²` at `ρ = -σ/δ,
/// ς = τ/β`; at `(1/2, 1, 1/2, -1)` `W` is the coherent-state form; on the
/// Husimi family `h = 4 exp(-κ|ρ-σ|² - |ς-τ|²/κ)`.
pub fn check_wigner_closed_forms(p: &RepParams, l: &GammaLabel, seed: u64) -> CheckReport {
    guard("wigner_closed_forms", SPECIAL_ANCHOR, SPECIAL_TOL, 0, || {
        let peak = PhasePoint::new(-l.sigma / p.delta(), l.tau / p.beta())?;
        let peak_err = (gamma_wigner(&peak, l, p) - 1.0 / (PI * PI)).abs();
        let mut rng = sampling::rng(seed ^ 0x66);
        let canonical = RepParams::canonical();
        let (mut canon_err, mut husimi_err) = (0.0f64, 0.0f64);
        for _ in 0..100 {
            let lab = sampling::label(&mut rng);
            let pt = PhasePoint::new(disk(&mut rng, 2.0), disk(&mut rng, 2.0))?;
            canon_err = canon_err.max((gamma_wigner(&pt, &lab, &canonical) - canonical_gamma_wigner(&pt, &lab)).abs());
            let kappa = rng.gen_range(-2.0f64..2.0).exp();
            let h = weyl_symbol_h(&pt, &lab, &husimi_params(kappa)?)?;
            husimi_err = husimi_err.max((h - 4.0 * husimi_kernel(&pt, &lab, kappa)).abs());
        }
        let worst = peak_err.max(canon_err).max(husimi_err);
        Ok(CheckReport::new(
            "wigner_closed_forms",
            SPECIAL_ANCHOR,
            worst,
            SPECIAL_TOL,
            0,
            &[("peak", peak_err), ("canonical", canon_err), ("husimi", husimi_err)],
        ))
    })
}

const WIGNER_ANCHOR: &str = "W(ρ,ς) of |Γ⟩ from ∫d²η/π³ ⟨Γ|ρ-η⟩⟨ρ+η|Γ⟩ e^{ης*-ςη*}";
// Gauss-Hermite at the overlap width converges to ~1e-12; truncation at 25 dominates
const WIGNER_TOL: f64 = 1e-6;

/// `-1, ..., 1` in `points` steps.
fn linspace(points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points).map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64).collect()
}

/// Numeric against closed-form Wigner function of `|Γ⟩` on a
/// `points⁴` grid over `[-1, 1]⁴`.
pub fn check_wigner(p: &RepParams, l: &GammaLabel, cutoff: usize, points: usize, order: usize) -> CheckReport {
    guard("wigner", WIGNER_ANCHOR, WIGNER_TOL, cutoff, || {
        let g = gamma_state(l, p, cutoff)?;
        let rule = wigner_rule(p, order)?;
        let axis = linspace(points);
        let plane: Vec<Complex64> = axis.iter().flat_map(|&x| axis.iter().map(move |&y| c(x, y))).collect();
        let mut worst: f64 = 0.0;
        for &rho in &plane {
            let numeric = wigner_numeric_row(&g, rho, &plane, &rule)?;
            for (&vs, w) in plane.iter().zip(numeric) {
                let exact = gamma_wigner(&PhasePoint::new(rho, vs)?, l, p);
                worst = worst.max((w - exact).abs());
            }
        }
        Ok(CheckReport::new(
            "wigner",
            WIGNER_ANCHOR,
            worst,
            WIGNER_TOL,
            cutoff,
            &[("order", order as f64), ("grid_points", (plane.len() * plane.len()) as f64)],
        ))
    })
}

const PROJECTION_ANCHOR: &str = "∫d²ς Δ_w(η,ς) = |η⟩⟨η|/π and ∫d²ρ Δ_w(ρ,ξ) = |ξ⟩⟨ξ|/π";
// exact once the order reaches 2N+1
const PROJECTION_TOL: f64 = 1e-5;

/// Both projection integrals at a random `η` and `ξ`, compared on
/// `n1, n2 <= cutoff - 4`.
pub fn check_projections(cutoff: usize, order: usize, seed: u64) -> CheckReport {
    guard("projections", PROJECTION_ANCHOR, PROJECTION_TOL, cutoff, || {
        let mut rng = sampling::rng(seed ^ 0x77);
        let rule = gauss_hermite_plane(order, 1.0)?;
        let block = cutoff.saturating_sub(4);
        let third = c(1.0 / PI, 0.0);
        let eta = EtaLabel(disk(&mut rng, 1.0));
        let xi = XiLabel(disk(&mut rng, 1.0));
        let e = eta_state(&eta, cutoff)?;
        let x = xi_state(&xi, cutoff)?;
        let pe = project_out_varsigma(&eta, cutoff, &rule)?;
        let px = project_out_rho(&xi, cutoff, &rule)?;
        let de = pe.max_abs_diff_on_block(&OperatorMatrix::outer(&e, &e)?.scaled(third), block);
        let dx = px.max_abs_diff_on_block(&OperatorMatrix::outer(&x, &x)?.scaled(third), block);
        let herm = pe.max_antihermitian().max(px.max_antihermitian());
        Ok(CheckReport::new(
            "projections",
            PROJECTION_ANCHOR,
            de.max(dx),
            PROJECTION_TOL,
            cutoff,
            &[("order", order as f64), ("block", block as f64), ("eta", de), ("xi", dx), ("max_antihermitian", herm)],
        ))
    })
}

const SQUEEZE_ANCHOR: &str = "∫d²η/(πμ) |η/μ⟩⟨η| = exp[(a1†a2† - a1a2) ln μ]";
// the ket-bra integral is exact at order 2N+1; the exponential is padded
const SQUEEZE_TOL: f64 = 1e-5;

/// The ket-bra integral against the matrix exponential on `n <= cutoff - 6`
/// and its vacuum column against the squeezed-vacuum series.
pub fn check_squeeze(mus: &[f64], cutoff: usize, order: usize) -> CheckReport {
    guard("squeeze", SQUEEZE_ANCHOR, SQUEEZE_TOL, cutoff, || {
        let block = cutoff.saturating_sub(6);
        let (mut op_err, mut col_err) = (0.0f64, 0.0f64);
        for &mu in mus {
            let integral = squeeze_integral(mu, cutoff, &squeeze_rule(mu, order)?)?;
            op_err = op_err.max(integral.max_abs_diff_on_block(&squeeze_operator_matrix(mu, cutoff)?, block));
            let col = integral.apply(&TwoModeState::vacuum(cutoff)?)?;
            let diff = col.sub(&squeezed_vacuum(mu, cutoff)?)?.restricted(block);
            col_err = col_err.max(diff.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        Ok(CheckReport::new(
            "squeeze",
            SQUEEZE_ANCHOR,
            op_err.max(col_err),
            SQUEEZE_TOL,
            cutoff,
            &[("order", order as f64), ("block", block as f64), ("operator", op_err), ("vacuum_column", col_err)],
        ))
    })
}

const H_ANCHOR: &str = "h(ρ,ς) = 4π² W(ρ,ς)";
const H_TOL: f64 = 1e-12;

/// The Weyl symbol against `4π²` times the Wigner function at random points,
/// parameters and labels.
pub fn check_weyl_symbol(seed: u64) -> CheckReport {
    guard("weyl_symbol", H_ANCHOR, H_TOL, 0, || {
        let mut rng = sampling::rng(seed ^ 0x88);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let p = sampling::wide_params(&mut rng);
            let lab = sampling::label(&mut rng);
            let pt = PhasePoint::new(disk(&mut rng, 2.0), disk(&mut rng, 2.0))?;
            worst = worst.max((weyl_symbol_h(&pt, &lab, &p)? - 4.0 * PI * PI * gamma_wigner(&pt, &lab, &p)).abs());
        }
        Ok(CheckReport::new("weyl_symbol", H_ANCHOR, worst, H_TOL, 0, &[("draws", 200.0)]))
    })
}

const TRACE_ANCHOR: &str = "∫d²ρd²ς h W_z = |⟨Γ|z1,z2⟩|²";
// nested Gauss-Hermite of order 20 on a shifted Gaussian converges far below this
const TRACE_TOL: f64 = 1e-5;

/// `⟨z|Γ⟩⟨Γ|z⟩` three ways: the closed-form overlap, the closed-form
/// Gaussian integral of `h W_z`, and nested quadrature of `h W_z` on the
/// rules matched to `h`.
pub fn check_weyl_trace(p: &RepParams, l: &GammaLabel, order: usize, seed: u64) -> CheckReport {
    guard("weyl_trace", TRACE_ANCHOR, TRACE_TOL, 0, || {
        let mut rng = sampling::rng(seed ^ 0x99);
        let (outer, inner_rule) = smoothing_rules(l, p, order)?;
        let (ow, iw) = (outer.effective_weights(true), inner_rule.effective_weights(true));
        let m = inner_rule.len();
        let mut worst: f64 = 0.0;
        for k in 0..4 {
            let (z1, z2) = if k == 0 { (c(0.0, 0.0), c(0.0, 0.0)) } else { (disk(&mut rng, 1.0), disk(&mut rng, 1.0)) };
            let direct = gamma_coherent_overlap(l, p, z1, z2).norm_sqr();
            let closed = weyl_coherent_trace(l, p, z1, z2)?;
            let numeric = fold_range(outer.len() * m, 1024, || 0.0, |acc, idx| {
                let (i, j) = (idx / m, idx % m);
                let pt = PhasePoint { rho: outer.nodes()[i], varsigma: inner_rule.nodes()[j] };
                *acc += ow[i] * iw[j] * weyl_symbol_h(&pt, l, p)? * coherent_wigner(&pt, z1, z2);
                Ok(())
            }, |acc, p| *acc += p)?;
            worst = worst.max((direct - closed).abs()).max((direct - numeric).abs());
        }
        Ok(CheckReport::new("weyl_trace", TRACE_ANCHOR, worst, TRACE_TOL, 0, &[("order", order as f64)]))
    })
}

const COMPLETE_ANCHOR: &str = "∫d²σd²τ |Γ⟩⟨Γ| / (4π²β²δ²) = 1";
// the integrand is polynomial times the rule's Gaussian, so only roundoff remains
const COMPLETE_TOL: f64 = 1e-3;

/// `∫d²σd²τ/(4π²β²δ²) ⟨m|Γ⟩⟨Γ|n⟩` for `m1, m2, n1, n2 <= subspace_max` by
/// a tensor Gauss–Hermite rule with `order` points per real dimension, at
/// the given scales.
pub fn completeness_matrix(p: &RepParams, cutoff: usize, subspace_max: usize, order: usize, scale_factor: f64) -> Result<DMatrix<Complex64>> {
    let sub = subspace_max.min(cutoff);
    let d = (sub + 1) * (sub + 1);
    let sigma_rule = gauss_hermite_plane(order, scale_factor * (-p.delta() / p.alpha()).sqrt())?;
    let tau_rule = gauss_hermite_plane(order, scale_factor * (p.beta() / p.gamma()).sqrt())?;
    let (sw, tw) = (sigma_rule.effective_weights(true), tau_rule.effective_weights(true));
    let m = tau_rule.len();
    let sum = fold_range(
        sigma_rule.len() * m,
        1024,
        || DMatrix::<Complex64>::zeros(d, d),
        |acc, idx| {
            let (i, j) = (idx / m, idx % m);
            let g = gamma_state(&GammaLabel::new(sigma_rule.nodes()[i], tau_rule.nodes()[j])?, p, cutoff)?;
            let v = DVector::from_iterator(d, (0..d).map(|k| g.coeff(k / (sub + 1), k % (sub + 1))));
            acc.ger(c(sw[i] * tw[j], 0.0), &v, &v.conjugate(), c(1.0, 0.0));
            Ok(())
        },
        |acc, p| *acc += p,
    )?;
    let norm = 4.0 * PI * PI * (p.beta() * p.delta()).powi(2);
    Ok(sum / c(norm, 0.0))
}

/// [`completeness_matrix`] against the identity. The deviation with the
/// rule scales halved is reported as a diagnostic.
pub fn check_completeness(p: &RepParams, cutoff: usize, subspace_max: usize, order: usize) -> CheckReport {
    guard("completeness", COMPLETE_ANCHOR, COMPLETE_TOL, cutoff, || {
        let dev = |m: &DMatrix<Complex64>| {
            let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
            (m - id).iter().map(|v| v.norm()).fold(0.0, f64::max)
        };
        let m = completeness_matrix(p, cutoff, subspace_max, order, 1.0)?;
        let halved = dev(&completeness_matrix(p, cutoff, subspace_max, order, 0.5)?);
        Ok(CheckReport::new(
            "completeness",
            COMPLETE_ANCHOR,
            dev(&m),
            COMPLETE_TOL,
            cutoff,
            &[("order", order as f64), ("subspace_max", subspace_max as f64), ("diag_00", m[(0, 0)].re), ("halved_scale_deviation", halved)],
        ))
    })
}

const SMOOTH_ANCHOR: &str = "∫d²ρd²ς h(ρ,ς) Δ_w(ρ,ς) = |Γ⟩⟨Γ|";
// entries on the n <= 8 block are degree-32 polynomials per plane, exact from order 17
const SMOOTH_TOL: f64 = 1e-4;

/// [`smoothed_projector`] against `|Γ⟩⟨Γ|` on `n1, n2 <= block`.
pub fn check_weyl_smoothing(p: &RepParams, l: &GammaLabel, cutoff: usize, block: usize, order: usize) -> CheckReport {
    guard("weyl_smoothing", SMOOTH_ANCHOR, SMOOTH_TOL, cutoff, || {
        let (outer, inner_rule) = smoothing_rules(l, p, order)?;
        let got = smoothed_projector(l, p, cutoff, &outer, &inner_rule)?;
        let want = gamma_projector(l, p, cutoff)?;
        let block = block.min(cutoff);
        let err = got.max_abs_diff_on_block(&want, block);
        Ok(CheckReport::new(
            "weyl_smoothing",
            SMOOTH_ANCHOR,
            err,
            SMOOTH_TOL,
            cutoff,
            &[
                ("order", order as f64),
                ("block", block as f64),
                ("trace", got.trace().re),
                ("min_eigenvalue", got.min_eigenvalue_on_block(block)),
                ("max_antihermitian", got.max_antihermitian()),
            ],
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_relations_hold_for_the_vacuum() {
        let p = husimi_params(2.0).unwrap();
        let l = GammaLabel::new(c(0.3, 0.2), c(-0.4, 0.1)).unwrap();
        let r = check_eigen_relations(&p, &l, &TwoModeState::vacuum(20).unwrap(), 1e-4).unwrap();
        assert!(r.passed, "{}", r.max_abs_error);
    }

    #[test]
    fn large_steps_are_refused() {
        let p = husimi_params(2.0).unwrap();
        let l = GammaLabel::new(c(0.3, 0.2), c(-0.4, 0.1)).unwrap();
        let err = check_eigen_relations(&p, &l, &TwoModeState::vacuum(20).unwrap(), 0.8).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn eigen_relations_reject_edge_supported_states() {
        let p = husimi_params(2.0).unwrap();
        let s = TwoModeState::basis(10, 9, 0).unwrap();
        assert!(matches!(check_eigen_relations(&p, &GammaLabel::origin(), &s, 1e-4), Err(Error::Domain(_))));
    }

    #[test]
    fn commutator_fails_at_the_truncation_edge() {
        // [Q,P] = i only holds away from the top level
        let p = husimi_params(2.0).unwrap();
        let g = gamma_state(&GammaLabel::new(c(1.0, 0.1), c(0.3, -0.2)).unwrap(), &p, 4).unwrap();
        let psi = TwoModeState::basis(4, 4, 0).unwrap();
        let qp = apply_collective(&apply_collective(&psi, Collective::PPlus).state, Collective::QPlus).state;
        let pq = apply_collective(&apply_collective(&psi, Collective::QPlus).state, Collective::PPlus).state;
        let lhs = inner(&g, &qp.sub(&pq).unwrap()).unwrap();
        let rhs = c(0.0, 1.0) * inner(&g, &psi).unwrap();
        assert!((lhs - rhs).norm() > 1e-2);
    }

    #[test]
    fn vacuum_marginals_agree_three_ways() {
        let p = husimi_params(1.5).unwrap();
        let l = GammaLabel::new(c(0.2, -0.5), c(0.3, 0.4)).unwrap();
        let v = marginal_values(&p, &l, &TwoModeState::vacuum(30).unwrap(), 32).unwrap();
        let xi = vacuum_marginal_xi(&l, &p).unwrap();
        let eta = vacuum_marginal_eta(&l, &p).unwrap();
        assert!((v.sigma_integral - xi).abs() < 1e-8 && (v.xi_convolution - xi).abs() < 1e-8);
        assert!((v.tau_integral - eta).abs() < 1e-8 && (v.eta_convolution - eta).abs() < 1e-8);
    }

    #[test]
    fn completeness_diagonal_at_canonical_parameters() {
        let m = completeness_matrix(&RepParams::canonical(), 6, 2, 8, 1.0).unwrap();
        assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        let id = DMatrix::<Complex64>::identity(9, 9);
        assert!((m - id).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn trace_test_at_the_trivial_point() {
        let r = check_weyl_trace(&RepParams::canonical(), &GammaLabel::origin(), 12, 1);
        assert!(r.passed, "{}", r.max_abs_error);
    }
}
