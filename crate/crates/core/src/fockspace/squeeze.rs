//! The two-mode squeezing operator `exp[(a1†a2† - a1a2) ln μ]`.
//!
//! The generator conserves `n1 - n2`, so the exponential splits into
//! independent chains `|j+k, j⟩` (or `|j, j+k⟩`). Each chain is exponentiated
//! at a padded working cutoff and then restricted, since exponentiating the
//! generator truncated at `N` itself is visibly wrong well inside the block.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ladder::{apply_ladder, Ladder, Mode};
use super::operator::OperatorMatrix;
use super::state::TwoModeState;
use crate::error::{Error, Result};

/// Extra levels used when exponentiating.
pub const SQUEEZE_PADDING: usize = 40;

/// `G = a1†a2† - a1a2` on the truncated space, built column by column from
/// ladder actions on basis states.
pub fn squeeze_generator(cutoff: usize) -> Result<OperatorMatrix> {
    let d = cutoff + 1;
    let mut g = OperatorMatrix::zeros(cutoff);
    for n1 in 0..d {
        for n2 in 0..d {
            let e = TwoModeState::basis(cutoff, n1, n2)?;
            let up = apply_ladder(&apply_ladder(&e, Mode::Two, Ladder::Create).state, Mode::One, Ladder::Create).state;
            let down = apply_ladder(&apply_ladder(&e, Mode::Two, Ladder::Annihilate).state, Mode::One, Ladder::Annihilate).state;
            let col = up.sub(&down)?.to_vector();
            let j = n1 * d + n2;
            g.entries_mut().set_column(j, &col);
        }
    }
    Ok(g)
}

/// `G` restricted to the chain `|j+k, j⟩`, `j < len`. The matrix is the same
/// for the mirrored chain `|j, j+k⟩`.
fn chain_generator(k: usize, len: usize) -> DMatrix<Complex64> {
    let mut g = DMatrix::zeros(len, len);
    for j in 0..len.saturating_sub(1) {
        let v = (((j + k + 1) * (j + 1)) as f64).sqrt();
        g[(j + 1, j)] = Complex64::new(v, 0.0);
        g[(j, j + 1)] = Complex64::new(-v, 0.0);
    }
    g
}

/// `exp[(a1†a2† - a1a2) ln μ]` restricted to `n1, n2 <= cutoff`, computed
/// with [`SQUEEZE_PADDING`] extra levels.
pub fn squeeze_operator_matrix(mu: f64, cutoff: usize) -> Result<OperatorMatrix> {
    squeeze_operator_matrix_padded(mu, cutoff, SQUEEZE_PADDING)
}

/// As [`squeeze_operator_matrix`] with an explicit padding. `padding = 0`
/// is the plain exponential of the truncated generator.
pub fn squeeze_operator_matrix_padded(mu: f64, cutoff: usize, padding: usize) -> Result<OperatorMatrix> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::Domain(format!("squeeze factor must be finite and positive, got {mu}")));
    }
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let work = cutoff + padding;
    let r = mu.ln();
    let mut out = OperatorMatrix::zeros(cutoff);
    for k in 0..=work {
        let e = (chain_generator(k, work - k + 1) * Complex64::new(r, 0.0)).exp();
        let len = e.nrows();
        for swapped in [false, true] {
            if swapped && k == 0 {
                continue;
            }
            // chain |j+k, j⟩, or |j, j+k⟩ when swapped
            let level = |j: usize| if swapped { (j, j + k) } else { (j + k, j) };
            for i in 0..len {
                for j in 0..len {
                    let (a, b) = level(i);
                    let (c, dd) = level(j);
                    if a <= cutoff && b <= cutoff && c <= cutoff && dd <= cutoff {
                        let (row, col) = (out.index(a, b), out.index(c, dd));
                        out.entries_mut()[(row, col)] = e[(i, j)];
                    }
                }
            }
        }
    }
    if out.entries().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Overflow("squeeze operator"));
    }
    Ok(out)
}

/// `sech(r) Σ tanh^n(r) |n, n⟩` with `r = ln μ`: the squeezing operator
/// applied to the vacuum.
pub fn squeezed_vacuum(mu: f64, cutoff: usize) -> Result<TwoModeState> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::Domain(format!("squeeze factor must be finite and positive, got {mu}")));
    }
    let r = mu.ln();
    let mut s = TwoModeState::zero(cutoff)?;
    let mut c = 1.0 / r.cosh();
    for n in 0..=cutoff {
        s = s.add(&TwoModeState::basis(cutoff, n, n)?.scaled(Complex64::new(c, 0.0)))?;
        c *= r.tanh();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_squeeze_is_identity() {
        let s = squeeze_operator_matrix(1.0, 6).unwrap();
        assert_eq!(s.max_abs_diff_on_block(&OperatorMatrix::identity(6), 6), 0.0);
    }

    #[test]
    fn vacuum_column_is_the_squeezed_vacuum() {
        for mu in [1.5, 2.0, 0.6] {
            let n = 16;
            let s = squeeze_operator_matrix(mu, n).unwrap();
            let col = s.apply(&TwoModeState::vacuum(n).unwrap()).unwrap();
            let want = squeezed_vacuum(mu, n).unwrap();
            assert!(col.sub(&want).unwrap().norm_sqr().sqrt() < 1e-12);
        }
    }

    #[test]
    fn generator_is_antihermitian() {
        let g = squeeze_generator(5).unwrap();
        let sum = g.entries() + g.entries().adjoint();
        assert!(sum.iter().all(|v| v.norm() < 1e-14));
        assert!((g.element((1, 1), (0, 0)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn chains_match_the_ladder_built_generator() {
        let n = 6;
        let g = squeeze_generator(n).unwrap();
        for k in 0..=n {
            let c = chain_generator(k, n - k + 1);
            for i in 0..=n - k {
                for j in 0..=n - k {
                    assert!((c[(i, j)] - g.element((i + k, i), (j + k, j))).norm() < 1e-14);
                    assert!((c[(i, j)] - g.element((i, i + k), (j, j + k))).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn padding_removes_truncation_error() {
        let n = 12;
        let reference = squeeze_operator_matrix_padded(2.0, n, 100).unwrap();
        let bare = squeeze_operator_matrix_padded(2.0, n, 0).unwrap();
        let padded = squeeze_operator_matrix(2.0, n).unwrap();
        assert!(bare.max_abs_diff_on_block(&reference, n - 6) > 1e-3);
        assert!(padded.max_abs_diff_on_block(&reference, n) < 1e-11);
    }

    #[test]
    fn inverse_squeeze_undoes_squeeze() {
        let n = 40;
        let a = squeeze_operator_matrix(1.5, n).unwrap();
        let b = squeeze_operator_matrix(1.0 / 1.5, n).unwrap();
        let psi = TwoModeState::basis(n, 2, 1).unwrap();
        let back = b.apply(&a.apply(&psi).unwrap()).unwrap();
        assert!(back.sub(&psi).unwrap().restricted(10).norm_sqr().sqrt() < 1e-10);
    }

    #[test]
    fn rejects_nonpositive_mu() {
        assert!(matches!(squeeze_operator_matrix(0.0, 4), Err(Error::Domain(_))));
    }
}
