//! Overlaps between two delta-normalized EPR kets.
//!
//! For `⟨ξ|η⟩` the truncated sum `Σ conj(b) a` does not converge as the
//! cutoff grows: the shell sums `s_d = Σ_{n1+n2=d}` stay of order one with
//! alternating sign. Only even shells survive, and `f(r) = Σ s_d r^d` behaves
//! like `1/(1 + r²)`: analytic on the unit disk with singularities at `r = ±i`,
//! so the value is taken as its Abel limit at `r = 1`. The substitution
//! `r = 2w/(1-w²)` sends `w = √2-1` to `r = 1` and `w = ±i` to `r = ±i`,
//! so the series re-expanded in `w` converges geometrically at `w = √2-1`.

use num_complex::Complex64;

use super::state::{check_cutoffs, TwoModeState};
use crate::error::Result;

/// Default number of shells: `N + N/3`, counting partially filled shells.
pub fn default_shells(cutoff: usize) -> usize {
    cutoff + cutoff / 3
}

/// Shell sums `s_d = Σ_{m1+m2=d} conj(bra_{m}) ket_{m}` for `d <= shells`,
/// using only entries inside the truncation.
pub fn shell_sums(bra: &TwoModeState, ket: &TwoModeState, shells: usize) -> Result<Vec<Complex64>> {
    check_cutoffs(bra, ket)?;
    let n = bra.cutoff();
    let top = shells.min(2 * n);
    Ok((0..=top)
        .map(|d| {
            (d.saturating_sub(n)..=d.min(n)).map(|m| bra.coeff(m, d - m).conj() * ket.coeff(m, d - m)).sum()
        })
        .collect())
}

/// Abel-resummed `⟨bra|ket⟩` from the shell sums. Agrees with the plain
/// inner product whenever the latter converges.
pub fn resummed_inner(bra: &TwoModeState, ket: &TwoModeState) -> Result<Complex64> {
    let s = shell_sums(bra, ket, default_shells(bra.cutoff()))?;
    Ok(conformal_sum(&s))
}

/// `Σ s_d r^d` at `r = 1`, re-expanded in `w` with `r = 2w/(1-w²)` and
/// evaluated at `w = √2 - 1`.
pub fn conformal_sum(s: &[Complex64]) -> Complex64 {
    let k = s.len();
    if k == 0 {
        return Complex64::new(0.0, 0.0);
    }
    // r(w) = 2(w + w³ + w⁵ + ...)
    let mut power = vec![0.0f64; k];
    power[0] = 1.0;
    let mut g = vec![Complex64::new(0.0, 0.0); k];
    for (d, sd) in s.iter().enumerate() {
        for (gi, p) in g.iter_mut().zip(&power) {
            *gi += sd * p;
        }
        if d + 1 < k {
            let mut next = vec![0.0f64; k];
            for (i, p) in power.iter().enumerate().filter(|(_, p)| **p != 0.0) {
                for j in (1..k - i).step_by(2) {
                    next[i + j] += 2.0 * p;
                }
            }
            power = next;
        }
    }
    let w0 = std::f64::consts::SQRT_2 - 1.0;
    g.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, gi| acc * w0 + gi)
}
