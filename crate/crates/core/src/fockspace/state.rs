use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::{EtaLabel, GammaLabel, RepParams, XiLabel};

/// A ket in the two-mode Fock space truncated at `n1, n2 <= cutoff`.
///
/// `coeffs[(n1, n2)]` is the amplitude on `|n1, n2⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    cutoff: usize,
    coeffs: DMatrix<Complex64>,
    dirac_normalized: bool,
}

impl TwoModeState {
    pub fn from_coeffs(coeffs: DMatrix<Complex64>, dirac_normalized: bool) -> Result<Self> {
        let dim = coeffs.nrows();
        if dim != coeffs.ncols() {
            return Err(Error::Domain(format!("coefficient array must be square, got {}x{}", dim, coeffs.ncols())));
        }
        if dim < 2 {
            return Err(Error::CutoffTooSmall(dim.saturating_sub(1)));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("state coefficients"));
        }
        Ok(TwoModeState { cutoff: dim - 1, coeffs, dirac_normalized })
    }

    pub fn zero(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        Ok(TwoModeState { cutoff, coeffs: DMatrix::zeros(cutoff + 1, cutoff + 1), dirac_normalized: false })
    }

    /// The number state `|n1, n2⟩`.
    pub fn basis(cutoff: usize, n1: usize, n2: usize) -> Result<Self> {
        let mut state = Self::zero(cutoff)?;
        if n1 > cutoff || n2 > cutoff {
            return Err(Error::Domain(format!("basis state |{n1},{n2}> outside cutoff {cutoff}")));
        }
        state.coeffs[(n1, n2)] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        Self::basis(cutoff, 0, 0)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, n1: usize, n2: usize) -> Complex64 {
        self.coeffs[(n1, n2)]
    }

    /// Whether the state is delta-normalized (`|η⟩`, `|ξ⟩`); such states carry
    /// no norm invariant.
    pub fn is_dirac_normalized(&self) -> bool {
        self.dirac_normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest `|coeff|` outside the block `n1, n2 <= max_level`.
    pub fn weight_outside(&self, max_level: usize) -> f64 {
        let mut w = 0.0;
        for n1 in 0..=self.cutoff {
            for n2 in 0..=self.cutoff {
                if n1 > max_level || n2 > max_level {
                    w += self.coeffs[(n1, n2)].norm_sqr();
                }
            }
        }
        w
    }

    /// Coefficients restricted to `n1, n2 <= max_level`, others zeroed.
    pub fn restricted(&self, max_level: usize) -> Self {
        let mut out = self.clone();
        for n1 in 0..=self.cutoff {
            for n2 in 0..=self.cutoff {
                if n1 > max_level || n2 > max_level {
                    out.coeffs[(n1, n2)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    /// Flat index `n1*(N+1) + n2` used by [`super::OperatorMatrix`].
    pub fn to_vector(&self) -> nalgebra::DVector<Complex64> {
        let d = self.dim();
        nalgebra::DVector::from_fn(d * d, |k, _| self.coeffs[(k / d, k % d)])
    }

    pub fn from_vector(cutoff: usize, v: &nalgebra::DVector<Complex64>, dirac_normalized: bool) -> Result<Self> {
        let d = cutoff + 1;
        if v.len() != d * d {
            return Err(Error::Domain(format!("vector length {} does not match cutoff {cutoff}", v.len())));
        }
        Self::from_coeffs(DMatrix::from_fn(d, d, |i, j| v[i * d + j]), dirac_normalized)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        TwoModeState { coeffs: &self.coeffs * factor, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_cutoffs(self, other)?;
        Ok(TwoModeState {
            cutoff: self.cutoff,
            coeffs: &self.coeffs + &other.coeffs,
            dirac_normalized: self.dirac_normalized || other.dirac_normalized,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }
}

impl Serialize for TwoModeState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let flat: Vec<[f64; 2]> = (0..d * d)
            .map(|k| {
                let c = self.coeffs[(k / d, k % d)];
                [c.re, c.im]
            })
            .collect();
        let mut s = serializer.serialize_struct("TwoModeState", 2)?;
        s.serialize_field("cutoff", &self.cutoff)?;
        s.serialize_field("coeffs", &flat)?;
        s.end()
    }
}

pub(crate) fn check_cutoffs(a: &TwoModeState, b: &TwoModeState) -> Result<()> {
    if a.cutoff != b.cutoff {
        Err(Error::CutoffMismatch { left: a.cutoff, right: b.cutoff })
    } else {
        Ok(())
    }
}

/// `scale * exp(A a1† + B a2† + C a1†a2†)|00⟩` truncated at `cutoff`.
///
/// Uses `e[m+1,n] = (A e[m,n] + C sqrt(n) e[m,n-1]) / sqrt(m+1)` and
/// `e[0,n+1] = B e[0,n] / sqrt(n+1)`, so no factorial is ever formed and the
/// entries do not depend on the cutoff.
pub fn exp_quadratic_ket(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    scale: Complex64,
    cutoff: usize,
) -> Result<TwoModeState> {
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let d = cutoff + 1;
    let sqrt: Vec<f64> = (0..=d).map(|k| (k as f64).sqrt()).collect();
    let mut e = DMatrix::<Complex64>::zeros(d, d);
    e[(0, 0)] = Complex64::new(1.0, 0.0);
    for n in 1..d {
        e[(0, n)] = b * e[(0, n - 1)] / sqrt[n];
    }
    for m in 0..cutoff {
        for n in 0..d {
            let mut v = a * e[(m, n)];
            if n > 0 {
                v += c * sqrt[n] * e[(m, n - 1)];
            }
            e[(m + 1, n)] = v / sqrt[m + 1];
        }
    }
    e *= scale;
    if e.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Overflow("exponential ket"));
    }
    Ok(TwoModeState { cutoff, coeffs: e, dirac_normalized: false })
}

/// The entangled state `|Γ⟩` labelled by `(sigma, tau)`.
pub fn gamma_state(label: &GammaLabel, p: &RepParams, cutoff: usize) -> Result<TwoModeState> {
    let (al, be, ga, de) = (p.alpha(), p.beta(), p.gamma(), p.delta());
    let (s, t) = (label.sigma, label.tau);
    let a = al * s + ga * t;
    let b = ga * t.conj() - al * s.conj();
    let c = Complex64::new(-p.pair_sum(), 0.0);
    let exponent = al * s.norm_sqr() / (2.0 * de) - ga * t.norm_sqr() / (2.0 * be);
    let scale = Complex64::new(2.0 * p.neg_product().sqrt() * exponent.exp(), 0.0);
    exp_quadratic_ket(a, b, c, scale, cutoff)
}

/// The EPR state `|η⟩` (delta-normalized).
pub fn eta_state(eta: &EtaLabel, cutoff: usize) -> Result<TwoModeState> {
    let e = eta.0;
    let scale = Complex64::new((-0.5 * e.norm_sqr()).exp(), 0.0);
    let mut s = exp_quadratic_ket(e, -e.conj(), Complex64::new(1.0, 0.0), scale, cutoff)?;
    s.dirac_normalized = true;
    Ok(s)
}

/// The conjugate EPR state `|ξ⟩` (delta-normalized).
pub fn xi_state(xi: &XiLabel, cutoff: usize) -> Result<TwoModeState> {
    let x = xi.0;
    let scale = Complex64::new((-0.5 * x.norm_sqr()).exp(), 0.0);
    let mut s = exp_quadratic_ket(x, x.conj(), Complex64::new(-1.0, 0.0), scale, cutoff)?;
    s.dirac_normalized = true;
    Ok(s)
}

/// The two-mode coherent state `|z1, z2⟩`.
pub fn coherent_state(z1: Complex64, z2: Complex64, cutoff: usize) -> Result<TwoModeState> {
    let scale = Complex64::new((-0.5 * (z1.norm_sqr() + z2.norm_sqr())).exp(), 0.0);
    exp_quadratic_ket(z1, z2, Complex64::new(0.0, 0.0), scale, cutoff)
}

/// `⟨bra|ket⟩ = Σ conj(bra) ket` over the truncated basis.
pub fn inner(bra: &TwoModeState, ket: &TwoModeState) -> Result<Complex64> {
    check_cutoffs(bra, ket)?;
    Ok(bra.coeffs.iter().zip(ket.coeffs.iter()).map(|(b, k)| b.conj() * k).sum())
}
