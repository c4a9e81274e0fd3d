use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constraint beta*gamma - alpha*delta = 1 violated (got {value})")]
    ConstraintViolation { value: f64 },

    #[error("sign condition violated: {0}")]
    SignViolation(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("cutoff {0} is too small (need at least 1)")]
    CutoffTooSmall(usize),

    #[error("coefficient overflow while building {0}")]
    Overflow(&'static str),

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("power-series coefficient overflow in normally ordered matrix")]
    SeriesOverflow,

    #[error("non-finite integrand sample at node {index} (z = {re}{im:+}i)")]
    NonFiniteSample { index: usize, re: f64, im: f64 },

    #[error("integral not converged: order-doubling changed the value by {delta:e} (tolerance {tolerance:e})")]
    NonConvergence { delta: f64, tolerance: f64 },

    #[error("state is Dirac-normalized and cannot be the subject of this transform")]
    NotNormalizable,

    #[error("imaginary residue {0:e} exceeds the allowed bound")]
    ImaginaryResidue(f64),

    #[error("finite-difference step too large: one-sided differences disagree by {relative:.3} (relative)")]
    StepTooLarge { relative: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
