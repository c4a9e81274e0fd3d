use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::TwoModeState;
use crate::error::{Error, Result};

/// A linear operator on the truncated two-mode space.
///
/// Rows and columns are indexed by `n1*(N+1) + n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    cutoff: usize,
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn from_entries(cutoff: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = (cutoff + 1) * (cutoff + 1);
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Domain(format!(
                "operator of shape {}x{} does not match cutoff {cutoff}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(OperatorMatrix { cutoff, entries })
    }

    pub fn zeros(cutoff: usize) -> Self {
        let dim = (cutoff + 1) * (cutoff + 1);
        OperatorMatrix { cutoff, entries: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(cutoff: usize) -> Self {
        let dim = (cutoff + 1) * (cutoff + 1);
        OperatorMatrix { cutoff, entries: DMatrix::identity(dim, dim) }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &TwoModeState, bra: &TwoModeState) -> Result<Self> {
        super::state::check_cutoffs(ket, bra)?;
        let k = ket.to_vector();
        let b = bra.to_vector();
        Ok(OperatorMatrix { cutoff: ket.cutoff(), entries: &k * b.adjoint() })
    }

    /// `A ⊗ B` for single-mode matrices `A` (mode 1) and `B` (mode 2).
    pub fn kron(mode1: &DMatrix<Complex64>, mode2: &DMatrix<Complex64>) -> Result<Self> {
        if mode1.shape() != mode2.shape() || mode1.nrows() != mode1.ncols() || mode1.nrows() < 2 {
            return Err(Error::Domain("single-mode factors must be square and of equal size".into()));
        }
        Self::from_entries(mode1.nrows() - 1, mode1.kronecker(mode2))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.entries
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * (self.cutoff + 1) + n2
    }

    /// `⟨m1 m2| X |n1 n2⟩`.
    pub fn element(&self, m: (usize, usize), n: (usize, usize)) -> Complex64 {
        self.entries[(self.index(m.0, m.1), self.index(n.0, n.1))]
    }

    pub fn apply(&self, state: &TwoModeState) -> Result<TwoModeState> {
        if state.cutoff() != self.cutoff {
            return Err(Error::CutoffMismatch { left: self.cutoff, right: state.cutoff() });
        }
        TwoModeState::from_vector(self.cutoff, &(&self.entries * state.to_vector()), state.is_dirac_normalized())
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        OperatorMatrix { cutoff: self.cutoff, entries: &self.entries * factor }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if other.cutoff != self.cutoff {
            return Err(Error::CutoffMismatch { left: self.cutoff, right: other.cutoff });
        }
        Ok(OperatorMatrix { cutoff: self.cutoff, entries: &self.entries * &other.entries })
    }

    /// Largest entry of `(X - X†)/2`.
    pub fn max_antihermitian(&self) -> f64 {
        let d = self.entries.nrows();
        let mut m: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                m = m.max(0.5 * (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// Flat indices of the interior block `n1, n2 <= max_level`.
    pub fn block_indices(&self, max_level: usize) -> Vec<usize> {
        let top = max_level.min(self.cutoff);
        (0..=top).flat_map(|a| (0..=top).map(move |b| (a, b))).map(|(a, b)| self.index(a, b)).collect()
    }

    /// Restriction to the block `n1, n2 <= max_level` as a plain matrix.
    pub fn block(&self, max_level: usize) -> DMatrix<Complex64> {
        let idx = self.block_indices(max_level);
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])])
    }

    /// Entrywise max deviation on the block `n1, n2 <= max_level`. Cutoffs
    /// may differ; entries are matched by occupation numbers.
    pub fn max_abs_diff_on_block(&self, other: &Self, max_level: usize) -> f64 {
        let top = max_level.min(self.cutoff).min(other.cutoff);
        let mut m: f64 = 0.0;
        for a in 0..=top {
            for b in 0..=top {
                for c in 0..=top {
                    for d in 0..=top {
                        m = m.max((self.element((a, b), (c, d)) - other.element((a, b), (c, d))).norm());
                    }
                }
            }
        }
        m
    }

    /// Smallest eigenvalue of the hermitian part on the interior block.
    pub fn min_eigenvalue_on_block(&self, max_level: usize) -> f64 {
        let b = self.block(max_level);
        let h = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
        nalgebra::SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::state::coherent_state;

    #[test]
    fn outer_product_projects() {
        let s = coherent_state(Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), 12).unwrap();
        let n = s.norm_sqr();
        let p = OperatorMatrix::outer(&s, &s).unwrap();
        assert!((p.trace() - Complex64::new(n, 0.0)).norm() < 1e-14);
        let ps = p.apply(&s).unwrap();
        assert!((ps.coeff(1, 2) - s.coeff(1, 2) * n).norm() < 1e-14);
        assert!(p.max_antihermitian() < 1e-16);
        assert!(p.min_eigenvalue_on_block(4) > -1e-14);
    }

    #[test]
    fn kron_uses_flat_index_convention() {
        let mut a = DMatrix::<Complex64>::zeros(3, 3);
        let mut b = DMatrix::<Complex64>::zeros(3, 3);
        a[(1, 2)] = Complex64::new(2.0, 0.0);
        b[(0, 1)] = Complex64::new(0.0, 3.0);
        let k = OperatorMatrix::kron(&a, &b).unwrap();
        assert_eq!(k.element((1, 0), (2, 1)), Complex64::new(0.0, 6.0));
    }

    #[test]
    fn block_comparison_across_cutoffs() {
        let a = OperatorMatrix::identity(4);
        let b = OperatorMatrix::identity(6);
        assert_eq!(a.max_abs_diff_on_block(&b, 4), 0.0);
        assert_eq!(a.block_indices(1), vec![0, 1, 5, 6]);
    }
}
