//! The entangled Wigner operator and the operator-valued integrals built on it.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::normal::{normally_ordered_gaussian_matrix, single_mode_normal_matrix, GaussianSymbol, SingleModeSymbol};
use crate::fockspace::{eta_state, gamma_state, inner, OperatorMatrix, TwoModeState};
use crate::params::{EtaLabel, GammaLabel, PhasePoint, RepParams};
use crate::quadrature::{fold_range, gauss_hermite_plane, PlaneRule};

/// Bound on the imaginary part of a numerically computed Wigner value.
pub const WIGNER_IMAGINARY_RESIDUE: f64 = 1e-8;

/// Nodes per partial sum in operator-valued integrals.
const MATRIX_CHUNK: usize = 1024;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `W(ρ,ς) = ∫ d²η/π³ ⟨ψ|ρ-η⟩⟨ρ+η|ψ⟩ exp(ης* - ςη*)`, with the EPR
/// overlaps taken from truncated Fock coefficients. The rule's Gaussian is
/// divided out, so its scale should follow the decay of the overlaps.
pub fn wigner_numeric(state: &TwoModeState, point: &PhasePoint, rule: &PlaneRule) -> Result<f64> {
    Ok(wigner_numeric_row(state, point.rho, &[point.varsigma], rule)?[0])
}

/// [`wigner_numeric`] at one `ρ` and several `ς`, sharing the overlaps.
pub fn wigner_numeric_row(state: &TwoModeState, rho: Complex64, varsigmas: &[Complex64], rule: &PlaneRule) -> Result<Vec<f64>> {
    if state.is_dirac_normalized() {
        return Err(Error::NotNormalizable);
    }
    let n = state.cutoff();
    let w = rule.effective_weights(true);
    let products = fold_range(
        rule.len(),
        crate::quadrature::CHUNK,
        Vec::new,
        |acc: &mut Vec<Complex64>, i| {
            let eta = rule.nodes()[i];
            let minus = inner(&eta_state(&EtaLabel(rho - eta), n)?, state)?;
            let plus = inner(&eta_state(&EtaLabel(rho + eta), n)?, state)?;
            acc.push(minus.conj() * plus);
            Ok(())
        },
        |acc, mut p| acc.append(&mut p),
    )?;
    varsigmas
        .iter()
        .map(|&vs| {
            let mut v = c(0.0, 0.0);
            for (i, (&eta, pr)) in rule.nodes().iter().zip(&products).enumerate() {
                let term = w[i] * pr * (eta * vs.conj() - vs * eta.conj()).exp();
                if !term.re.is_finite() || !term.im.is_finite() {
                    return Err(Error::NonFiniteSample { index: i, re: eta.re, im: eta.im });
                }
                v += term;
            }
            v /= PI.powi(3);
            if v.im.abs() > WIGNER_IMAGINARY_RESIDUE {
                return Err(Error::ImaginaryResidue(v.im.abs()));
            }
            Ok(v.re)
        })
        .collect()
}

/// A Gauss–Hermite rule matched to the `η` decay of the Wigner integrand of
/// `|Γ⟩`, whose overlaps fall off as `exp(αδ/(βγ)|η|²)`.
pub fn wigner_rule(p: &RepParams, order: usize) -> Result<PlaneRule> {
    gauss_hermite_plane(order, (-1.0 / p.rho_coefficient()).sqrt())
}

/// Normally ordered symbol of `Δ_w(ρ, ς)`.
pub fn wigner_symbol(point: &PhasePoint) -> GaussianSymbol {
    let (rho, vs) = (point.rho, point.varsigma);
    let zero = c(0.0, 0.0);
    GaussianSymbol {
        scale: c((-rho.norm_sqr() - vs.norm_sqr()).exp() / (PI * PI), 0.0),
        quadratic: [[c(-2.0, 0.0), zero], [zero, c(-2.0, 0.0)]],
        create: [rho + vs, vs.conj() - rho.conj()],
        annihilate: [rho.conj() + vs.conj(), vs - rho],
        create_pair: zero,
        annihilate_pair: zero,
    }
}

/// Matrix of the entangled Wigner operator `Δ_w(ρ, ς)`.
pub fn wigner_op_matrix(point: &PhasePoint, cutoff: usize) -> Result<OperatorMatrix> {
    normally_ordered_gaussian_matrix(&wigner_symbol(point), cutoff)
}

/// Single-mode Wigner operator `(1/π):exp(-2(a† - ᾱ*)(a - ᾱ)):` as an
/// `(N+1)×(N+1)` matrix.
pub fn single_mode_wigner_matrix(alpha_bar: Complex64, cutoff: usize) -> Result<DMatrix<Complex64>> {
    let symbol = SingleModeSymbol {
        scale: c((-2.0 * alpha_bar.norm_sqr()).exp() / PI, 0.0),
        quadratic: c(-2.0, 0.0),
        create: 2.0 * alpha_bar,
        annihilate: 2.0 * alpha_bar.conj(),
    };
    single_mode_normal_matrix(&symbol, cutoff)
}

/// Single-mode arguments `(ᾱ, β̄)` with `ς = ᾱ + β̄*` and `ρ = ᾱ - β̄*`.
pub fn factor_point(point: &PhasePoint) -> (Complex64, Complex64) {
    let alpha_bar = 0.5 * (point.rho + point.varsigma);
    let beta_bar = (0.5 * (point.varsigma - point.rho)).conj();
    (alpha_bar, beta_bar)
}

/// `Δ(ᾱ) ⊗ Δ(β̄)` under the map of [`factor_point`].
pub fn factorized_wigner_matrix(point: &PhasePoint, cutoff: usize) -> Result<OperatorMatrix> {
    let (a, b) = factor_point(point);
    OperatorMatrix::kron(&single_mode_wigner_matrix(a, cutoff)?, &single_mode_wigner_matrix(b, cutoff)?)
}

/// `Σ_i w_i g(i)` for operator-valued `g`, deterministic in the node order.
fn integrate_matrix<G>(count: usize, cutoff: usize, g: G) -> Result<OperatorMatrix>
where
    G: Fn(usize) -> Result<(f64, OperatorMatrix)> + Sync,
{
    let dim = (cutoff + 1) * (cutoff + 1);
    let sum = fold_range(
        count,
        MATRIX_CHUNK,
        || DMatrix::<Complex64>::zeros(dim, dim),
        |acc, i| {
            let (w, m) = g(i)?;
            *acc += m.entries() * c(w, 0.0);
            Ok(())
        },
        |acc, p| *acc += p,
    )?;
    OperatorMatrix::from_entries(cutoff, sum)
}

/// `∫ d²ς Δ_w(η, ς)`, which should equal `(1/π)|η⟩⟨η|`. The `ς` dependence
/// of every entry is a polynomial of degree `4·cutoff` times `exp(-|ς|²)`, so a unit-scale
/// Gauss–Hermite rule of order `2·cutoff + 1` is exact.
pub fn project_out_varsigma(eta_target: &EtaLabel, cutoff: usize, rule: &PlaneRule) -> Result<OperatorMatrix> {
    let w = rule.effective_weights(true);
    integrate_matrix(rule.len(), cutoff, |i| {
        let pt = PhasePoint { rho: eta_target.0, varsigma: rule.nodes()[i] };
        Ok((w[i], wigner_op_matrix(&pt, cutoff)?))
    })
}

/// `∫ d²ρ Δ_w(ρ, ξ)`, which should equal `(1/π)|ξ⟩⟨ξ|`.
pub fn project_out_rho(xi_target: &crate::params::XiLabel, cutoff: usize, rule: &PlaneRule) -> Result<OperatorMatrix> {
    let w = rule.effective_weights(true);
    integrate_matrix(rule.len(), cutoff, |i| {
        let pt = PhasePoint { rho: rule.nodes()[i], varsigma: xi_target.0 };
        Ok((w[i], wigner_op_matrix(&pt, cutoff)?))
    })
}

/// Gauss–Hermite rules matched to `h(ρ,ς) Δ_w(ρ,ς)`: in `ρ` the product
/// decays as `exp(a|ρ-ρ0|² - |ρ|²)`, centred at `aρ0/(a-1)` with scale
/// `1/√(1-a)`; likewise in `ς`.
pub fn smoothing_rules(l: &GammaLabel, p: &RepParams, order: usize) -> Result<(PlaneRule, PlaneRule)> {
    let a = p.rho_coefficient();
    let rho0 = -l.sigma / p.delta();
    let b = p.varsigma_coefficient();
    let vs0 = l.tau / p.beta();
    let outer = gauss_hermite_plane(order, (1.0 / (1.0 - a)).sqrt())?.centered(a * rho0 / (a - 1.0));
    let inner = gauss_hermite_plane(order, (1.0 / (1.0 - b)).sqrt())?.centered(b * vs0 / (b - 1.0));
    Ok((outer, inner))
}

/// `∫ d²ρ d²ς h(ρ,ς) Δ_w(ρ,ς)` by nested quadrature (outer `ρ`, inner
/// `ς`), to be compared with `|Γ⟩⟨Γ|`.
pub fn smoothed_projector(l: &GammaLabel, p: &RepParams, cutoff: usize, outer: &PlaneRule, inner: &PlaneRule) -> Result<OperatorMatrix> {
    let ow = outer.effective_weights(true);
    let iw = inner.effective_weights(true);
    let m = inner.len();
    integrate_matrix(outer.len() * m, cutoff, |k| {
        let (i, j) = (k / m, k % m);
        let pt = PhasePoint { rho: outer.nodes()[i], varsigma: inner.nodes()[j] };
        let h = crate::analytic::weyl_symbol_h(&pt, l, p)?;
        Ok((ow[i] * iw[j] * h, wigner_op_matrix(&pt, cutoff)?))
    })
}

/// `|Γ⟩⟨Γ|` from the Fock coefficients.
pub fn gamma_projector(l: &GammaLabel, p: &RepParams, cutoff: usize) -> Result<OperatorMatrix> {
    let g = gamma_state(l, p, cutoff)?;
    OperatorMatrix::outer(&g, &g)
}

/// Gauss–Hermite rule matched to `|η/μ⟩⟨η|`, whose entries decay as
/// `exp(-(1 + 1/μ²)|η|²/2)`.
pub fn squeeze_rule(mu: f64, order: usize) -> Result<PlaneRule> {
    gauss_hermite_plane(order, (2.0 / (1.0 + 1.0 / (mu * mu))).sqrt())
}

/// `∫ d²η/(πμ) |η/μ⟩⟨η|`, to be compared with the squeezing operator.
pub fn squeeze_integral(mu: f64, cutoff: usize, rule: &PlaneRule) -> Result<OperatorMatrix> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::Domain(format!("squeeze factor must be finite and positive, got {mu}")));
    }
    let w = rule.effective_weights(true);
    integrate_matrix(rule.len(), cutoff, |i| {
        let e = rule.nodes()[i];
        let ket = eta_state(&EtaLabel(e / mu), cutoff)?;
        let bra = eta_state(&EtaLabel(e), cutoff)?;
        Ok((w[i] / (PI * mu), OperatorMatrix::outer(&ket, &bra)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{coherent_wigner, gamma_wigner};
    use crate::fockspace::normal::normally_ordered_gaussian_matrix_general;
    use crate::fockspace::{coherent_state, squeeze_operator_matrix, xi_state};
    use crate::params::{husimi_params, XiLabel};

    #[test]
    fn vacuum_wigner_at_origin() {
        let v = TwoModeState::vacuum(12).unwrap();
        let r = gauss_hermite_plane(20, 1.0).unwrap();
        let w = wigner_numeric(&v, &PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), &r).unwrap();
        assert!((w - 1.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn dirac_states_are_rejected() {
        let e = eta_state(&EtaLabel(c(0.1, 0.0)), 6).unwrap();
        let r = gauss_hermite_plane(4, 1.0).unwrap();
        let pt = PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(wigner_numeric(&e, &pt, &r).unwrap_err(), Error::NotNormalizable);
    }

    #[test]
    fn coherent_state_wigner_matches_closed_form() {
        let (z1, z2) = (c(0.3, -0.2), c(-0.1, 0.4));
        let s = coherent_state(z1, z2, 25).unwrap();
        let r = gauss_hermite_plane(30, 1.0).unwrap();
        for pt in [PhasePoint::new(c(0.2, 0.1), c(-0.3, 0.5)).unwrap(), PhasePoint::new(c(-0.9, 0.4), c(0.6, -0.7)).unwrap()] {
            let w = wigner_numeric(&s, &pt, &r).unwrap();
            assert!((w - coherent_wigner(&pt, z1, z2)).abs() < 1e-8);
        }
    }

    #[test]
    fn gamma_state_wigner_matches_closed_form() {
        let p = husimi_params(1.7).unwrap();
        let l = GammaLabel::new(c(0.4, -0.3), c(-0.2, 0.6)).unwrap();
        let s = gamma_state(&l, &p, 25).unwrap();
        let r = wigner_rule(&p, 30).unwrap();
        let pt = PhasePoint::new(c(0.5, 0.2), c(-0.4, 0.3)).unwrap();
        let w = wigner_numeric(&s, &pt, &r).unwrap();
        assert!((w - gamma_wigner(&pt, &l, &p)).abs() < 1e-8, "{w} {}", gamma_wigner(&pt, &l, &p));
    }

    #[test]
    fn wigner_operator_is_hermitian_and_traces_to_wigner_function() {
        let (z1, z2) = (c(0.2, 0.1), c(-0.15, 0.05));
        let n = 14;
        let s = coherent_state(z1, z2, n).unwrap();
        for pt in [PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), PhasePoint::new(c(0.3, -0.5), c(0.7, 0.2)).unwrap()] {
            let d = wigner_op_matrix(&pt, n).unwrap();
            assert!(d.max_antihermitian() < 1e-12);
            let w = inner(&s, &d.apply(&s).unwrap()).unwrap();
            assert!((w.re - coherent_wigner(&pt, z1, z2)).abs() < 1e-8 && w.im.abs() < 1e-12);
        }
    }

    #[test]
    fn factorization_through_single_mode_operators() {
        for pt in [PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), PhasePoint::new(c(0.4, -0.2), c(-0.3, 0.8)).unwrap()] {
            let general = normally_ordered_gaussian_matrix_general(&wigner_symbol(&pt), 4).unwrap();
            let product = factorized_wigner_matrix(&pt, 4).unwrap();
            assert!(general.max_abs_diff_on_block(&product, 4) < 1e-12);
        }
    }

    #[test]
    fn single_mode_wigner_vacuum_and_trace() {
        let m = single_mode_wigner_matrix(c(0.0, 0.0), 10).unwrap();
        assert!((m[(0, 0)] - c(1.0 / PI, 0.0)).norm() < 1e-15);
        // diagonal is (-1)^n/π, so partial traces alternate between 1/π and 0
        for n in 0..=10 {
            let t: Complex64 = (0..=n).map(|k| m[(k, k)]).sum();
            let want = if n % 2 == 0 { 1.0 / PI } else { 0.0 };
            assert!((t.re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn projections_give_epr_projectors() {
        let n = 8;
        let rule = gauss_hermite_plane(2 * n + 1, 1.0).unwrap();
        let eta = EtaLabel(c(0.3, -0.4));
        let got = project_out_varsigma(&eta, n, &rule).unwrap();
        let e = eta_state(&eta, n).unwrap();
        let want = OperatorMatrix::outer(&e, &e).unwrap().scaled(c(1.0 / PI, 0.0));
        assert!(got.max_abs_diff_on_block(&want, n) < 1e-12);
        let xi = XiLabel(c(-0.2, 0.5));
        let got = project_out_rho(&xi, n, &rule).unwrap();
        let x = xi_state(&xi, n).unwrap();
        let want = OperatorMatrix::outer(&x, &x).unwrap().scaled(c(1.0 / PI, 0.0));
        assert!(got.max_abs_diff_on_block(&want, n) < 1e-12);
    }

    #[test]
    fn smoothing_reconstructs_projector_at_small_cutoff() {
        let p = husimi_params(1.5).unwrap();
        let l = GammaLabel::new(c(0.2, 0.1), c(-0.3, 0.2)).unwrap();
        let n = 4;
        let (outer, inner) = smoothing_rules(&l, &p, 2 * n + 1).unwrap();
        let got = smoothed_projector(&l, &p, n, &outer, &inner).unwrap();
        let want = gamma_projector(&l, &p, n).unwrap();
        assert!(got.max_abs_diff_on_block(&want, n) < 1e-12);
    }

    #[test]
    fn squeeze_integral_matches_exponential() {
        let n = 8;
        for mu in [1.0, 1.5, 2.0] {
            let got = squeeze_integral(mu, n, &squeeze_rule(mu, 2 * n + 1).unwrap()).unwrap();
            let want = squeeze_operator_matrix(mu, n).unwrap();
            assert!(got.max_abs_diff_on_block(&want, n) < 1e-10, "{mu}");
        }
    }
}
