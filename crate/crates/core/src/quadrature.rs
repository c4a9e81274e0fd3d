//! Integration over complex planes, `d²z = d(Re z) d(Im z)`.
//!
//! Node evaluation may run on several threads. Nodes are cut into chunks of
//! fixed size independent of the thread count, each chunk is folded in node
//! order, and chunk results are merged in chunk order, so every sum is
//! bit-identical for any worker count.

use std::f64::consts::PI;

use gauss_quad::{GaussHermite, GaussLegendre};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes per reduction chunk.
pub const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    GaussHermite,
    TensorLegendre,
}

/// A product rule on one complex plane.
///
/// Gauss–Hermite: `Σ w_i f(z_i) ≈ ∫ d²z exp(-|z - c|²/s²) f(z)`.
/// Tensor–Legendre: `Σ w_i f(z_i) ≈ ∫ f d²z` over the square of half-width
/// `s` around `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRule {
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    kind: RuleKind,
    order: usize,
    scale: f64,
    center: Complex64,
}

fn hermite_1d(order: usize) -> Result<Vec<(f64, f64)>> {
    match order {
        0 => Err(Error::Domain("quadrature order must be at least 1".into())),
        1 => Ok(vec![(0.0, PI.sqrt())]),
        n => {
            let pairs = GaussHermite::new(n)
                .map_err(|e| Error::Domain(e.to_string()))?
                .into_node_weight_pairs();
            Ok(symmetrized(pairs))
        }
    }
}

/// Sorts nodes and makes the rule exactly symmetric about the origin, which
/// the eigenvalue route only achieves to rounding.
fn symmetrized(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len();
    for i in 0..n / 2 {
        let (lo, hi) = (pairs[i], pairs[n - 1 - i]);
        let x = 0.5 * (hi.0 - lo.0);
        let w = 0.5 * (hi.1 + lo.1);
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs
}

fn legendre_1d(order: usize) -> Result<Vec<(f64, f64)>> {
    match order {
        0 => Err(Error::Domain("quadrature order must be at least 1".into())),
        1 => Ok(vec![(0.0, 2.0)]),
        n => {
            let pairs = GaussLegendre::new(n)
                .map_err(|e| Error::Domain(e.to_string()))?
                .into_node_weight_pairs();
            Ok(symmetrized(pairs))
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rule scale must be finite and positive, got {scale}")))
    }
}

/// Tensor product of two 1D Gauss–Hermite rules, `order²` nodes.
pub fn gauss_hermite_plane(order: usize, scale: f64) -> Result<PlaneRule> {
    check_scale(scale)?;
    let one = hermite_1d(order)?;
    let mut nodes = Vec::with_capacity(one.len() * one.len());
    let mut weights = Vec::with_capacity(one.len() * one.len());
    for &(x, wx) in &one {
        for &(y, wy) in &one {
            nodes.push(Complex64::new(scale * x, scale * y));
            weights.push(scale * scale * wx * wy);
        }
    }
    Ok(PlaneRule { nodes, weights, kind: RuleKind::GaussHermite, order, scale, center: Complex64::new(0.0, 0.0) })
}

/// Tensor product of two 1D Gauss–Legendre rules on the square
/// `|Re(z - c)|, |Im(z - c)| <= half_width`.
pub fn tensor_legendre_plane(order: usize, half_width: f64, center: Complex64) -> Result<PlaneRule> {
    check_scale(half_width)?;
    let one = legendre_1d(order)?;
    let mut nodes = Vec::with_capacity(one.len() * one.len());
    let mut weights = Vec::with_capacity(one.len() * one.len());
    for &(x, wx) in &one {
        for &(y, wy) in &one {
            nodes.push(center + Complex64::new(half_width * x, half_width * y));
            weights.push(half_width * half_width * wx * wy);
        }
    }
    Ok(PlaneRule { nodes, weights, kind: RuleKind::TensorLegendre, order, scale: half_width, center })
}

impl PlaneRule {
    /// The same rule translated so that its weight function is centred at `center`.
    pub fn centered(mut self, center: Complex64) -> Self {
        let shift = center - self.center;
        for z in &mut self.nodes {
            *z += shift;
        }
        self.center = center;
        self
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same kind of rule with a different order.
    pub fn with_order(&self, order: usize) -> Result<PlaneRule> {
        match self.kind {
            RuleKind::GaussHermite => Ok(gauss_hermite_plane(order, self.scale)?.centered(self.center)),
            RuleKind::TensorLegendre => tensor_legendre_plane(order, self.scale, self.center),
        }
    }

    /// The weight function the rule integrates against, at `z`.
    pub fn weight_function(&self, z: Complex64) -> f64 {
        match self.kind {
            RuleKind::GaussHermite => (-(z - self.center).norm_sqr() / (self.scale * self.scale)).exp(),
            RuleKind::TensorLegendre => 1.0,
        }
    }

    /// Weights for integrands that carry their own Gaussian
    /// (`gaussian_included`), i.e. with the rule's weight function divided out.
    pub fn effective_weights(&self, gaussian_included: bool) -> Vec<f64> {
        if !gaussian_included || self.kind == RuleKind::TensorLegendre {
            return self.weights.clone();
        }
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * ((z - self.center).norm_sqr() / (self.scale * self.scale)).exp())
            .collect()
    }
}

/// Deterministic parallel fold over the indices `0..count`.
///
/// Indices are cut into chunks of `chunk` consecutive values, `add` folds
/// one index into a chunk's partial result, and `merge` combines partial
/// results in chunk order. The topology depends only on `count` and `chunk`.
pub fn fold_range<T, I, A, M>(count: usize, chunk: usize, init: I, add: A, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    A: Fn(&mut T, usize) -> Result<()> + Sync,
    M: Fn(&mut T, T),
{
    let chunk = chunk.max(1);
    let starts: Vec<usize> = (0..count).step_by(chunk).collect();
    let partials: Vec<Result<T>> = starts
        .par_iter()
        .map(|&start| {
            let mut acc = init();
            for i in start..(start + chunk).min(count) {
                add(&mut acc, i)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = init();
    for p in partials {
        merge(&mut total, p?);
    }
    Ok(total)
}

/// [`fold_range`] over `(node, weight)` pairs with the default chunk size.
pub fn fold_nodes<T, I, A, M>(nodes: &[Complex64], weights: &[f64], init: I, add: A, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    A: Fn(&mut T, usize, Complex64, f64) -> Result<()> + Sync,
    M: Fn(&mut T, T),
{
    fold_range(nodes.len(), CHUNK, init, |acc, i| add(acc, i, nodes[i], weights[i]), merge)
}

fn finite_sample(v: Complex64, index: usize, z: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample { index, re: z.re, im: z.im })
    }
}

/// `Σ w_i f(z_i)`, with the rule's Gaussian divided out when the integrand
/// already decays on its own.
pub fn integrate_plane<F>(f: F, rule: &PlaneRule, gaussian_included: bool) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let weights = rule.effective_weights(gaussian_included);
    fold_nodes(
        rule.nodes(),
        &weights,
        || Complex64::new(0.0, 0.0),
        |acc, i, z, w| {
            *acc += w * finite_sample(f(z), i, z)?;
            Ok(())
        },
        |acc, p| *acc += p,
    )
}

/// An integral together with its value at twice the order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Converged {
    pub value: Complex64,
    pub doubled: Complex64,
    pub delta: f64,
}

/// Integrates at the rule's order and at twice the order; fails with
/// `NonConvergence` if the two differ by more than `tolerance`.
pub fn integrate_plane_checked<F>(f: F, rule: &PlaneRule, gaussian_included: bool, tolerance: f64) -> Result<Converged>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let value = integrate_plane(&f, rule, gaussian_included)?;
    let doubled = integrate_plane(&f, &rule.with_order(2 * rule.order())?, gaussian_included)?;
    let delta = (doubled - value).norm();
    if delta > tolerance {
        return Err(Error::NonConvergence { delta, tolerance });
    }
    Ok(Converged { value, doubled, delta })
}

/// Monte Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub stderr: f64,
}

/// `∫ f d²z` by importance sampling from the density
/// `exp(-|z - c|²/w²)/(π w²)`. Identical seeds give identical results.
pub fn monte_carlo_plane<F>(f: F, importance_center: Complex64, importance_width: f64, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    check_scale(importance_width)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sd = importance_width / std::f64::consts::SQRT_2;
    let nodes: Vec<Complex64> = (0..samples)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            importance_center + Complex64::new(sd * x, sd * y)
        })
        .collect();
    let norm = PI * importance_width * importance_width;
    let ones = vec![1.0; samples];
    // (Σ v, Σ |v|²) of v = f/p
    let (sum, sum_sq) = fold_nodes(
        &nodes,
        &ones,
        || (Complex64::new(0.0, 0.0), 0.0),
        |acc, i, z, _| {
            let p = (-(z - importance_center).norm_sqr() / (importance_width * importance_width)).exp() / norm;
            let v = finite_sample(f(z), i, z)? / p;
            acc.0 += v;
            acc.1 += v.norm_sqr();
            Ok(())
        },
        |acc, p| {
            acc.0 += p.0;
            acc.1 += p.1;
        },
    )?;
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
    Ok(McEstimate { estimate: mean, stderr: (var / n).sqrt() })
}

/// `Σ_i Σ_j w_i v_j f(z_i, w_j)` over outer and inner rules, outer nodes in
/// row-major order.
pub fn nested_plane_integral<F>(f: F, outer: &PlaneRule, inner: &PlaneRule, gaussian_included: bool) -> Result<Complex64>
where
    F: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    let ow = outer.effective_weights(gaussian_included);
    let iw = inner.effective_weights(gaussian_included);
    fold_nodes(
        outer.nodes(),
        &ow,
        || Complex64::new(0.0, 0.0),
        |acc, i, z, w| {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, (&u, &v)) in inner.nodes().iter().zip(&iw).enumerate() {
                row += v * finite_sample(f(z, u), i * inner.len() + j, u)?;
            }
            *acc += w * row;
            Ok(())
        },
        |acc, p| *acc += p,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::complex_gaussian_integral;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn order_one_rule_gives_gaussian_area() {
        let r = gauss_hermite_plane(1, 1.0).unwrap();
        assert!((integrate_plane(|_| c(1.0, 0.0), &r, false).unwrap() - PI).norm() < 1e-15);
        let r = gauss_hermite_plane(8, 1.7).unwrap();
        assert!((integrate_plane(|_| c(1.0, 0.0), &r, false).unwrap() - PI * 1.7 * 1.7).norm() < 1e-12);
    }

    #[test]
    fn second_moment_matches_polar_integral() {
        // ∫ e^{-r²/s²} r² d²z = π s⁴
        let s = 1.3;
        let r = gauss_hermite_plane(4, s).unwrap();
        let v = integrate_plane(|z| c(z.norm_sqr(), 0.0), &r, false).unwrap();
        assert!((v.re - PI * s.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral_formula_by_quadrature() {
        for (zeta, xi, eta) in [(c(-1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)), (c(-2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0)), (c(-0.7, 0.3), c(0.2, -0.5), c(-0.4, 0.1))] {
            let s = (1.0 / -zeta.re).sqrt();
            let r = gauss_hermite_plane(40, s).unwrap();
            let v = integrate_plane(|z| (zeta * z.norm_sqr() + xi * z + eta * z.conj()).exp() / PI, &r, true).unwrap();
            let want = complex_gaussian_integral(zeta, xi, eta).unwrap();
            assert!((v - want).norm() < 1e-10 * want.norm(), "{v} {want}");
        }
    }

    #[test]
    fn legendre_rule_on_wide_square() {
        let r = tensor_legendre_plane(60, 7.0, c(0.0, 0.0)).unwrap();
        let v = integrate_plane(|z| c((-z.norm_sqr()).exp(), 0.0), &r, false).unwrap();
        assert!((v.re - PI).abs() < 1e-8);
    }

    #[test]
    fn centered_rule_and_included_gaussian() {
        let z0 = c(0.7, -0.4);
        let r = gauss_hermite_plane(12, 1.0).unwrap().centered(z0);
        let v = integrate_plane(|z| c((-(z - z0).norm_sqr()).exp(), 0.0), &r, true).unwrap();
        assert!((v.re - PI).abs() < 1e-13);
    }

    #[test]
    fn concentrated_integrand_is_flagged() {
        let r = gauss_hermite_plane(8, 1.0).unwrap();
        let spike = |z: Complex64| c((-30.0 * z.norm_sqr()).exp() * 30.0 / PI, 0.0);
        assert!(matches!(integrate_plane_checked(spike, &r, true, 1e-6), Err(Error::NonConvergence { .. })));
        let smooth = |z: Complex64| c((-z.norm_sqr()).exp(), 0.0);
        let ok = integrate_plane_checked(smooth, &r, true, 1e-10).unwrap();
        assert!((ok.value.re - PI).abs() < 1e-12);
    }

    #[test]
    fn non_finite_sample_reports_node() {
        let r = gauss_hermite_plane(3, 1.0).unwrap();
        let err = integrate_plane(|z| if z.re > 0.5 { c(f64::NAN, 0.0) } else { c(1.0, 0.0) }, &r, false).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { index: 6, .. }), "{err:?}");
    }

    #[test]
    fn monte_carlo_examples() {
        let z0 = c(0.2, 0.1);
        let g = |z: Complex64| c((-(z - z0).norm_sqr() / 0.64).exp(), 0.0);
        let e = monte_carlo_plane(g, z0, 0.8, 1000, 1).unwrap();
        assert!((e.estimate.re - PI * 0.64).abs() < 1e-12 && e.stderr < 1e-12);

        let (zeta, xi, eta) = (c(-2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0));
        let f = |z: Complex64| (zeta * z.norm_sqr() + xi * z + eta * z.conj()).exp() / PI;
        let e = monte_carlo_plane(f, c(0.5, 0.5), 0.8, 1_000_000, 7).unwrap();
        let want = complex_gaussian_integral(zeta, xi, eta).unwrap();
        assert!((e.estimate - want).norm() < 3.0 * e.stderr, "{:?} {want}", e);
        let again = monte_carlo_plane(f, c(0.5, 0.5), 0.8, 1_000_000, 7).unwrap();
        assert_eq!(e.estimate.re.to_bits(), again.estimate.re.to_bits());
        assert!(matches!(monte_carlo_plane(f, z0, 1.0, 1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn nested_separable_gaussians() {
        let r = gauss_hermite_plane(10, 1.0).unwrap();
        let v = nested_plane_integral(|z, w| c((-z.norm_sqr() - w.norm_sqr()).exp(), 0.0), &r, &r, true).unwrap();
        assert!((v.re - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn reduction_is_thread_count_independent() {
        let r = gauss_hermite_plane(30, 1.1).unwrap();
        let f = |z: Complex64| (c(0.3, 0.7) * z + z.conj() * z.conj()).exp();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| integrate_plane(f, &r, false).unwrap())
        };
        let (a, b) = (run(1), run(3));
        assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
    }

    proptest! {
        #[test]
        fn hermite_rule_is_exact_on_monomials(n in 2usize..12, a in 0u32..12, b in 0u32..12) {
            prop_assume!((a + b) as usize <= 2 * n - 1);
            let r = gauss_hermite_plane(n, 1.0).unwrap();
            let v = integrate_plane(|z| c(z.re.powi(a as i32) * z.im.powi(b as i32), 0.0), &r, false).unwrap().re;
            // ∫ x^a e^{-x²} dx = Γ((a+1)/2) for even a, 0 for odd a
            let moment = |k: u32| if k % 2 == 1 { 0.0 } else { (1..=k / 2).map(|i| (2 * i - 1) as f64 / 2.0).product::<f64>() * PI.sqrt() };
            let want = moment(a) * moment(b);
            // relative to the size of the integrand, ∫|x^a y^b| e^{-|z|²}
            let size = integrate_plane(|z| c((z.re.powi(a as i32) * z.im.powi(b as i32)).abs(), 0.0), &r, false).unwrap().re;
            prop_assert!((v - want).abs() <= 1e-12 * size);
        }
    }
}
