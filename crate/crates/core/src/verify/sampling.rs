//! Seeded random draws of labels, parameters and test states.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fockspace::TwoModeState;
use crate::params::{validate_params, GammaLabel, PhasePoint, RepParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the disk `|z| <= radius`.
pub fn disk(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
}

pub fn label(rng: &mut impl Rng) -> GammaLabel {
    GammaLabel::new(disk(rng, 1.0), disk(rng, 1.0)).expect("finite")
}

/// Valid parameters with `|α|, |β|` in `mag` and `βγ` in `bg`, both signs.
pub fn params_in(rng: &mut impl Rng, mag: Range<f64>, bg: Range<f64>) -> RepParams {
    loop {
        let beta = rng.gen_range(mag.clone()) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let t = rng.gen_range(bg.clone());
        let alpha = rng.gen_range(mag.clone()) * beta.signum();
        if let Ok(p) = validate_params(alpha, beta, t / beta, (t - 1.0) / alpha) {
            return p;
        }
    }
}

/// Parameters over a wide range, for closed-form identities.
pub fn wide_params(rng: &mut impl Rng) -> RepParams {
    params_in(rng, 0.3..2.0, 0.05..0.95)
}

/// Parameters whose `|Γ⟩` is resolved at cutoff 25 for labels in the unit disk.
pub fn moderate_params(rng: &mut impl Rng) -> RepParams {
    params_in(rng, 0.6..1.4, 0.3..0.7)
}

/// A normalized state supported on `n1, n2 <= support`.
pub fn interior_state(rng: &mut impl Rng, cutoff: usize, support: usize) -> TwoModeState {
    let d = cutoff + 1;
    let mut m = DMatrix::zeros(d, d);
    for i in 0..=support.min(cutoff) {
        for j in 0..=support.min(cutoff) {
            m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let s = TwoModeState::from_coeffs(m, false).expect("finite");
    let n = s.norm_sqr().sqrt();
    s.scaled(Complex64::new(1.0 / n, 0.0))
}

/// The origin followed by `count` points with `ρ, ς` in the unit disk.
pub fn phase_points(count: usize, seed: u64) -> Vec<PhasePoint> {
    let mut r = rng(seed);
    let mut v = vec![PhasePoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).expect("finite")];
    for _ in 0..count {
        v.push(PhasePoint::new(disk(&mut r, 1.0), disk(&mut r, 1.0)).expect("finite"));
    }
    v
}
