//! Truncated two-mode Fock space: kets, ladder actions and operator matrices.

pub mod ladder;
pub mod normal;
pub mod operator;
pub mod resum;
pub mod squeeze;
pub mod state;

pub use ladder::{apply_collective, apply_ladder, apply_quadrature, Applied, Collective, Ladder, Mode, Quadrature};
pub use normal::{normally_ordered_gaussian_matrix, single_mode_normal_matrix, GaussianSymbol, SingleModeSymbol};
pub use operator::OperatorMatrix;
pub use resum::resummed_inner;
pub use squeeze::{squeeze_operator_matrix, squeezed_vacuum};
pub use state::{coherent_state, eta_state, exp_quadratic_ket, gamma_state, inner, xi_state, TwoModeState};
