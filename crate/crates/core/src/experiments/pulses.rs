use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::qstate::JointState;

/// Ramsey zone before (R1) or after (R2) the cavity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RamseyZone {
    R1,
    R2,
}

/// |g> -> (|g> + |e>)/sqrt2, |e> -> (|e> - |g>)/sqrt2 on the atom; fields untouched.
/// Both zones use the same map.
pub fn pi_half_pulse(state: &JointState, zone: RamseyZone) -> JointState {
    match zone {
        RamseyZone::R1 | RamseyZone::R2 => pi_half_pulse_phased(state, 0.0),
    }
}

/// Pulse with microwave phase `phase`:
/// |g> -> (|g> + e^{i phase} |e>)/sqrt2, |e> -> (|e> - e^{-i phase} |g>)/sqrt2.
pub fn pi_half_pulse_phased(state: &JointState, phase: f64) -> JointState {
    let dim = state.dim();
    let bg = state.block_g();
    let be = state.block_e();
    let u = C64::from_polar(1.0, phase);
    let g = (&bg - &be * u.conj()) * C64::new(FRAC_1_SQRT_2, 0.0);
    let e = (&bg * u + &be) * C64::new(FRAC_1_SQRT_2, 0.0);
    let mut v = nalgebra::DVector::from_element(2 * dim, C64::new(0.0, 0.0));
    v.rows_mut(0, dim).copy_from(&g);
    v.rows_mut(dim, dim).copy_from(&e);
    JointState::from_vector(&v, dim).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{coherent_state, FieldState};

    fn atom(c_g: C64, c_e: C64) -> JointState {
        JointState::product(c_g, c_e, FieldState::vacuum(4).unwrap())
    }

    #[test]
    fn r1_from_ground_gives_equal_superposition() {
        let s = pi_half_pulse(&atom(C64::new(1.0, 0.0), C64::new(0.0, 0.0)), RamseyZone::R1);
        let (pg, pe) = s.populations();
        assert!((pg - 0.5).abs() < 1e-15 && (pe - 0.5).abs() < 1e-15);
        let v = s.to_vector();
        assert!((v[0] - v[4]).norm() < 1e-15);
    }

    #[test]
    fn two_pulses_flip_the_atom() {
        let g = atom(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let twice = pi_half_pulse(&pi_half_pulse(&g, RamseyZone::R2), RamseyZone::R2);
        let (pg, pe) = twice.populations();
        assert!(pg < 1e-15 && (pe - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fringe_from_relative_phase() {
        for k in 0..12 {
            let phi = 0.55 * k as f64;
            let s = atom(C64::new(FRAC_1_SQRT_2, 0.0), C64::from_polar(FRAC_1_SQRT_2, phi));
            let (pg, pe) = pi_half_pulse(&s, RamseyZone::R2).populations();
            assert!((pe - (1.0 + phi.cos()) / 2.0).abs() < 1e-14);
            assert!((pg + pe - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn phased_pulse_is_unitary_on_entangled_states() {
        let a = coherent_state(C64::new(0.4, 0.1), 12).unwrap();
        let b = coherent_state(C64::new(-0.3, 0.2), 12).unwrap();
        let s = JointState::new(a, b, C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        for &phase in &[0.0, 1.0, std::f64::consts::PI] {
            let out = pi_half_pulse_phased(&s, phase);
            assert!((out.total_probability() - s.total_probability()).abs() < 1e-12);
            let back = pi_half_pulse_phased(&pi_half_pulse_phased(&out, phase), phase);
            let back = pi_half_pulse_phased(&back, phase);
            // four quarter turns are -1
            assert!((back.to_vector() + s.to_vector()).norm() < 1e-12);
        }
    }
}
