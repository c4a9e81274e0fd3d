use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::TwoModeState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Q1,
    Q2,
    P1,
    P2,
}

/// Result of an operator application on a truncated state. `dropped_weight` is
/// the squared norm of amplitude pushed above the cutoff and discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub state: TwoModeState,
    pub dropped_weight: f64,
}

/// Applies `a_i` or `a_i†`. Creation out of the top level drops that amplitude.
pub fn apply_ladder(state: &TwoModeState, mode: Mode, kind: Ladder) -> Applied {
    let d = state.dim();
    let n = state.cutoff();
    let src = state.coeffs();
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    let mut dropped = 0.0;
    // (row, col) of the source entry with the level index in the acted mode first
    let at = |level: usize, other: usize| match mode {
        Mode::One => (level, other),
        Mode::Two => (other, level),
    };
    for other in 0..d {
        match kind {
            Ladder::Annihilate => {
                for level in 1..d {
                    out[at(level - 1, other)] = src[at(level, other)] * (level as f64).sqrt();
                }
            }
            Ladder::Create => {
                for level in 0..n {
                    out[at(level + 1, other)] = src[at(level, other)] * ((level + 1) as f64).sqrt();
                }
                dropped += src[at(n, other)].norm_sqr() * (n + 1) as f64;
            }
        }
    }
    let state = TwoModeState::from_coeffs(out, state.is_dirac_normalized())
        .expect("ladder action preserves shape and finiteness");
    Applied { state, dropped_weight: dropped }
}

/// `Q_i = (a_i + a_i†)/√2`, `P_i = (a_i - a_i†)/(√2 i)`.
pub fn apply_quadrature(state: &TwoModeState, which: Quadrature) -> Applied {
    let (mode, momentum) = match which {
        Quadrature::Q1 => (Mode::One, false),
        Quadrature::Q2 => (Mode::Two, false),
        Quadrature::P1 => (Mode::One, true),
        Quadrature::P2 => (Mode::Two, true),
    };
    let down = apply_ladder(state, mode, Ladder::Annihilate);
    let up = apply_ladder(state, mode, Ladder::Create);
    let coeffs = if momentum {
        (down.state.coeffs() - up.state.coeffs()) * Complex64::new(0.0, -1.0 / SQRT_2)
    } else {
        (down.state.coeffs() + up.state.coeffs()) / Complex64::new(SQRT_2, 0.0)
    };
    let state = TwoModeState::from_coeffs(coeffs, state.is_dirac_normalized()).expect("same shape");
    Applied { state, dropped_weight: up.dropped_weight / 2.0 }
}

/// `(Q1 ± Q2)/√2` and `(P1 ± P2)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collective {
    QMinus,
    QPlus,
    PMinus,
    PPlus,
}

pub fn apply_collective(state: &TwoModeState, which: Collective) -> Applied {
    let (first, second, sign) = match which {
        Collective::QMinus => (Quadrature::Q1, Quadrature::Q2, -1.0),
        Collective::QPlus => (Quadrature::Q1, Quadrature::Q2, 1.0),
        Collective::PMinus => (Quadrature::P1, Quadrature::P2, -1.0),
        Collective::PPlus => (Quadrature::P1, Quadrature::P2, 1.0),
    };
    let x = apply_quadrature(state, first);
    let y = apply_quadrature(state, second);
    let coeffs = (x.state.coeffs() + y.state.coeffs() * Complex64::new(sign, 0.0)) / Complex64::new(SQRT_2, 0.0);
    Applied {
        state: TwoModeState::from_coeffs(coeffs, state.is_dirac_normalized()).expect("same shape"),
        dropped_weight: x.dropped_weight + y.dropped_weight,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::state::{coherent_state, eta_state, inner, xi_state};
    use crate::params::{EtaLabel, XiLabel};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff_interior(a: &TwoModeState, b: &TwoModeState, max_level: usize) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=max_level {
            for j in 0..=max_level {
                m = m.max((a.coeff(i, j) - b.coeff(i, j)).norm());
            }
        }
        m
    }

    #[test]
    fn annihilating_vacuum_gives_zero() {
        let v = TwoModeState::vacuum(4).unwrap();
        for mode in [Mode::One, Mode::Two] {
            let r = apply_ladder(&v, mode, Ladder::Annihilate);
            assert_eq!(r.state.norm_sqr(), 0.0);
        }
    }

    #[test]
    fn number_operator_on_basis_states() {
        for (n1, n2) in [(0, 0), (2, 3), (4, 1)] {
            let s = TwoModeState::basis(5, n1, n2).unwrap();
            let up = apply_ladder(&s, Mode::One, Ladder::Create);
            let back = apply_ladder(&up.state, Mode::One, Ladder::Annihilate);
            assert!((back.state.coeff(n1, n2) - c((n1 + 1) as f64, 0.0)).norm() < 1e-14);
            assert!((back.state.norm_sqr() - ((n1 + 1) * (n1 + 1)) as f64).abs() < 1e-12);
            assert_eq!(up.dropped_weight, 0.0);
        }
    }

    #[test]
    fn creation_at_top_level_is_dropped_and_reported() {
        let s = TwoModeState::basis(3, 1, 3).unwrap();
        let r = apply_ladder(&s, Mode::Two, Ladder::Create);
        assert_eq!(r.state.norm_sqr(), 0.0);
        assert!((r.dropped_weight - 4.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_quadrature_variance() {
        let v = TwoModeState::vacuum(4).unwrap();
        let q = apply_quadrature(&v, Quadrature::Q1);
        let qq = apply_quadrature(&q.state, Quadrature::Q1);
        assert!((inner(&v, &qq.state).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let p = apply_quadrature(&v, Quadrature::P2);
        assert!((inner(&p.state, &p.state).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coherent_state_is_an_annihilation_eigenvector() {
        let (z1, z2) = (c(0.4, -0.7), c(-0.2, 0.5));
        let s = coherent_state(z1, z2, 20).unwrap();
        let a1 = apply_ladder(&s, Mode::One, Ladder::Annihilate);
        assert!(max_diff_interior(&a1.state, &s.scaled(z1), 19) < 1e-10);
        let a2 = apply_ladder(&s, Mode::Two, Ladder::Annihilate);
        assert!(max_diff_interior(&a2.state, &s.scaled(z2), 19) < 1e-10);
    }

    #[test]
    fn eta_eigen_relations_on_interior() {
        let n = 20;
        for eta in [c(0.3, -0.6), c(-0.8, 0.4), c(0.0, 1.0)] {
            let s = eta_state(&EtaLabel(eta), n).unwrap();
            let qm = apply_collective(&s, Collective::QMinus);
            // (Q1 - Q2)|η⟩ = √2 η1 |η⟩ and (P1 + P2)|η⟩ = √2 η2 |η⟩; the collective
            // operators carry an extra 1/√2.
            assert!(max_diff_interior(&qm.state, &s.scaled(c(eta.re, 0.0)), n - 2) < 1e-10);
            let pp = apply_collective(&s, Collective::PPlus);
            assert!(max_diff_interior(&pp.state, &s.scaled(c(eta.im, 0.0)), n - 2) < 1e-10);
        }
    }

    #[test]
    fn xi_eigen_relations_on_interior() {
        let n = 20;
        for xi in [c(0.5, 0.2), c(-0.3, -0.9)] {
            let s = xi_state(&XiLabel(xi), n).unwrap();
            let qp = apply_collective(&s, Collective::QPlus);
            assert!(max_diff_interior(&qp.state, &s.scaled(c(xi.re, 0.0)), n - 2) < 1e-10);
            let pm = apply_collective(&s, Collective::PMinus);
            assert!(max_diff_interior(&pm.state, &s.scaled(c(xi.im, 0.0)), n - 2) < 1e-10);
        }
    }

    #[test]
    fn collective_commutator_on_interior_states() {
        let n = 12;
        let mut psi = TwoModeState::zero(n).unwrap();
        let mut seed = 1u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..5 {
            for j in 0..5 {
                psi = psi.add(&TwoModeState::basis(n, i, j).unwrap().scaled(c(next(), next()))).unwrap();
            }
        }
        for (q, p) in [(Collective::QPlus, Collective::PPlus), (Collective::QMinus, Collective::PMinus)] {
            let qp = apply_collective(&apply_collective(&psi, p).state, q).state;
            let pq = apply_collective(&apply_collective(&psi, q).state, p).state;
            let comm = qp.sub(&pq).unwrap();
            let expected = psi.scaled(c(0.0, 1.0));
            let v = inner(&psi, &comm).unwrap();
            assert!((v - inner(&psi, &expected).unwrap()).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn canonical_commutator_on_interior(re in proptest::collection::vec(-1.0f64..1.0, 16), im in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let n = 6;
            let mut coeffs = DMatrix::<Complex64>::zeros(n + 1, n + 1);
            for k in 0..16 {
                coeffs[(k / 4, k % 4)] = c(re[k], im[k]);
            }
            let psi = TwoModeState::from_coeffs(coeffs, false).unwrap();
            for mode in [Mode::One, Mode::Two] {
                let aad = apply_ladder(&apply_ladder(&psi, mode, Ladder::Create).state, mode, Ladder::Annihilate).state;
                let ada = apply_ladder(&apply_ladder(&psi, mode, Ladder::Annihilate).state, mode, Ladder::Create).state;
                let comm = aad.sub(&ada).unwrap();
                prop_assert!(max_diff_interior(&comm, &psi, n) <= 1e-12);
            }
        }
    }
}
