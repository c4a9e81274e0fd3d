//! Matrix elements of normally ordered Gaussian operators.
//!
//! For a normally ordered `:G(a†, a):` the unnormalized coherent states
//! `||z⟩ = exp(z·a†)|0⟩` give `⟨z̄||:G:||z⟩ = G(z̄, z) exp(z̄·z)`, and since
//! `⟨m||z⟩ = z^m/√m!` the matrix element `⟨m|:G:|n⟩` is `√(m! n!)` times the
//! coefficient of `z̄^m z^n` in `G(z̄, z) exp(z̄·z)`. That coefficient is
//! obtained by multiplying truncated power series, one exponential factor per
//! term of the exponent. Each variable is truncated at the cutoff, so every
//! returned entry is exact (there is no series tail).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::OperatorMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `scale · :exp(Σ λ_ij a_i† a_j + Σ u_i a_i† + Σ v_i a_i + b a1†a2† + b' a1 a2):`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSymbol {
    pub scale: Complex64,
    /// `quadratic[i][j]` multiplies `a_i† a_j`.
    pub quadratic: [[Complex64; 2]; 2],
    pub create: [Complex64; 2],
    pub annihilate: [Complex64; 2],
    pub create_pair: Complex64,
    pub annihilate_pair: Complex64,
}

impl GaussianSymbol {
    /// `:exp(0): = 1`.
    pub fn identity() -> Self {
        GaussianSymbol {
            scale: ONE,
            quadratic: [[ZERO; 2]; 2],
            create: [ZERO; 2],
            annihilate: [ZERO; 2],
            create_pair: ZERO,
            annihilate_pair: ZERO,
        }
    }

    /// `:exp(-a1†a1 - a2†a2): = |00⟩⟨00|`.
    pub fn vacuum_projector() -> Self {
        GaussianSymbol { quadratic: [[-ONE, ZERO], [ZERO, -ONE]], ..Self::identity() }
    }

    /// The c-number function `G(z̄, z)`.
    pub fn evaluate(&self, zbar: [Complex64; 2], z: [Complex64; 2]) -> Complex64 {
        let mut e = self.create_pair * zbar[0] * zbar[1] + self.annihilate_pair * z[0] * z[1];
        for i in 0..2 {
            e += self.create[i] * zbar[i] + self.annihilate[i] * z[i];
            for j in 0..2 {
                e += self.quadratic[i][j] * zbar[i] * z[j];
            }
        }
        self.scale * e.exp()
    }

    /// True when the exponent has no term coupling the two modes.
    pub fn is_separable(&self) -> bool {
        self.quadratic[0][1] == ZERO && self.quadratic[1][0] == ZERO && self.create_pair == ZERO && self.annihilate_pair == ZERO
    }

    fn mode(&self, i: usize) -> SingleModeSymbol {
        SingleModeSymbol { scale: ONE, quadratic: self.quadratic[i][i], create: self.create[i], annihilate: self.annihilate[i] }
    }
}

/// `scale · :exp(λ a†a + u a† + v a):` on one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeSymbol {
    pub scale: Complex64,
    pub quadratic: Complex64,
    pub create: Complex64,
    pub annihilate: Complex64,
}

/// Dense power series in `dims.len()` variables, each of degree `<= cutoff`,
/// storing `coefficient × √(Π idx_k!)`.
struct Series {
    cutoff: usize,
    rank: usize,
    data: Vec<Complex64>,
    sqrt: Vec<f64>,
}

impl Series {
    fn constant(rank: usize, cutoff: usize, value: Complex64) -> Self {
        let len = (cutoff + 1).pow(rank as u32);
        let mut data = vec![ZERO; len];
        data[0] = value;
        Series { cutoff, rank, data, sqrt: (0..=cutoff + 1).map(|k| (k as f64).sqrt()).collect() }
    }

    fn stride(&self, axis: usize) -> usize {
        (self.cutoff + 1).pow((self.rank - 1 - axis) as u32)
    }

    /// Multiplies by `exp(c · Π_{a in axes} x_a)` (distinct axes).
    fn multiply_exp(&mut self, c: Complex64, axes: &[usize]) {
        if c == ZERO {
            return;
        }
        let d = self.cutoff + 1;
        let step: usize = axes.iter().map(|&a| self.stride(a)).sum();
        let old = self.data.clone();
        let mut digits = vec![0usize; self.rank];
        for (flat, out) in self.data.iter_mut().enumerate() {
            let mut rem = flat;
            for k in (0..self.rank).rev() {
                digits[k] = rem % d;
                rem /= d;
            }
            let kmax = axes.iter().map(|&a| digits[a]).min().unwrap_or(0);
            let mut acc = old[flat];
            let mut factor = ONE;
            let mut src = flat;
            for k in 1..=kmax {
                src -= step;
                // c^k/k! · Π_a √(j_a!/(j_a-k)!), built incrementally
                let mut r = 1.0 / k as f64;
                for &a in axes {
                    r *= self.sqrt[digits[a] - k + 1];
                }
                factor *= c * r;
                acc += factor * old[src];
            }
            *out = acc;
        }
    }

    fn check(&self) -> Result<()> {
        if self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::SeriesOverflow)
        }
    }
}

/// `⟨m|:G:|n⟩` for a single-mode symbol, as an `(N+1)×(N+1)` matrix.
pub fn single_mode_normal_matrix(symbol: &SingleModeSymbol, cutoff: usize) -> Result<DMatrix<Complex64>> {
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    // axes: [z̄, z]
    let mut s = Series::constant(2, cutoff, symbol.scale);
    s.multiply_exp(symbol.quadratic + ONE, &[0, 1]);
    s.multiply_exp(symbol.create, &[0]);
    s.multiply_exp(symbol.annihilate, &[1]);
    s.check()?;
    let d = cutoff + 1;
    Ok(DMatrix::from_fn(d, d, |m, n| s.data[m * d + n]))
}

/// Matrix of a two-mode normally ordered Gaussian through the full
/// four-variable series, regardless of separability.
pub fn normally_ordered_gaussian_matrix_general(symbol: &GaussianSymbol, cutoff: usize) -> Result<OperatorMatrix> {
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    // axes: [z̄1, z̄2, z1, z2]
    let mut s = Series::constant(4, cutoff, symbol.scale);
    for i in 0..2 {
        for j in 0..2 {
            let c = symbol.quadratic[i][j] + if i == j { ONE } else { ZERO };
            s.multiply_exp(c, &[i, 2 + j]);
        }
        s.multiply_exp(symbol.create[i], &[i]);
        s.multiply_exp(symbol.annihilate[i], &[2 + i]);
    }
    s.multiply_exp(symbol.create_pair, &[0, 1]);
    s.multiply_exp(symbol.annihilate_pair, &[2, 3]);
    s.check()?;
    // data[((m1 d + m2) d + n1) d + n2] is already row-major in (m, n)
    let dim = (cutoff + 1) * (cutoff + 1);
    OperatorMatrix::from_entries(cutoff, DMatrix::from_row_slice(dim, dim, &s.data))
}

/// Matrix of `s·:exp(...):` on the truncated two-mode space. Symbols with no
/// mode coupling are assembled as a Kronecker product of single-mode series.
pub fn normally_ordered_gaussian_matrix(symbol: &GaussianSymbol, cutoff: usize) -> Result<OperatorMatrix> {
    if !symbol.is_separable() {
        return normally_ordered_gaussian_matrix_general(symbol, cutoff);
    }
    let m1 = single_mode_normal_matrix(&symbol.mode(0), cutoff)?;
    let m2 = single_mode_normal_matrix(&symbol.mode(1), cutoff)?;
    let op = OperatorMatrix::kron(&m1, &m2)?;
    let scaled = op.scaled(symbol.scale);
    if scaled.entries().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SeriesOverflow);
    }
    Ok(scaled)
}
