use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::pulses::{pi_half_pulse, pi_half_pulse_phased, RamseyZone};
use super::{remove_free_evolution, Mode, NumericSettings};
use crate::analytic::{rotating_frame_amplitude, total_phase_closed, Branch, DriveProfile};
use crate::error::Result;
use crate::params::SystemParams;
use crate::propagate::{propagate, HamiltonianSpec};
use crate::qstate::{coherent_state, FieldState, JointState};

/// Microwave phase of the second zone in the cat protocol.
const R2_PHASE: f64 = PI;

/// Field state conditioned on one atomic detection outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CatResult {
    pub detected: Branch,
    pub field_state: FieldState,
    pub probability: f64,
    pub fidelity_vs_reference: f64,
    /// 2 pi (kappa/chi)^2
    pub relative_phase: f64,
}

/// Both detection outcomes; an outcome with zero probability has no state.
#[derive(Clone, Debug, PartialEq)]
pub struct CatOutcome {
    pub ground: Option<CatResult>,
    pub excited: Option<CatResult>,
    pub p_g: f64,
    pub p_e: f64,
}

/// Normalized |2k/chi> + s e^{2 pi i (k/chi)^2} |-2k/chi>, with s = +1 for
/// ground detection and -1 for excited detection.
pub fn cat_reference(params: &SystemParams, detected: Branch, dim: usize) -> Result<FieldState> {
    let r = params.drive_ratio();
    let sign = match detected {
        Branch::Ground => 1.0,
        Branch::Excited => -1.0,
    };
    let plus = coherent_state(C64::new(2.0 * r, 0.0), dim)?;
    let minus = coherent_state(C64::new(-2.0 * r, 0.0), dim)?;
    let phase = C64::from_polar(sign, 2.0 * PI * r * r);
    let v: DVector<C64> = plus.amplitudes() + minus.amplitudes() * phase;
    Ok(FieldState::from_amplitudes(v)?.normalized())
}

/// R1, cavity transit for chi t = pi, removal of the free phases, R2 with a
/// pi microwave phase, then projection on each atomic level.
pub fn cat_generate(params: &SystemParams, mode: Mode, settings: &NumericSettings) -> Result<CatOutcome> {
    params.validate()?;
    let dim = settings.dim;
    let t = PI / params.chi;
    let start = JointState::product(C64::new(1.0, 0.0), C64::new(0.0, 0.0), FieldState::vacuum(dim)?);
    let prepared = pi_half_pulse(&start, RamseyZone::R1);
    let after_cavity = match mode {
        Mode::Analytic => {
            let branch_state = |b: Branch| -> Result<(FieldState, C64)> {
                let field = coherent_state(rotating_frame_amplitude(params, b, t), dim)?;
                Ok((field, C64::from_polar(FRAC_1_SQRT_2, total_phase_closed(params, b, t))))
            };
            let (fg, cg) = branch_state(Branch::Ground)?;
            let (fe, ce) = branch_state(Branch::Excited)?;
            JointState::new(fg, fe, cg, ce)?
        }
        Mode::Numeric => {
            let spec = HamiltonianSpec::joint(*params, DriveProfile::resonant(params), dim)?;
            let mut v = propagate(&prepared.to_vector(), &spec, 0.0, t, &settings.stepper, 1)?.state;
            remove_free_evolution(&mut v, dim, params, t, t);
            JointState::from_vector(&v, dim)?
        }
    };
    let out = pi_half_pulse_phased(&after_cavity, R2_PHASE);
    let (p_g, p_e) = out.populations();
    let relative_phase = 2.0 * PI * params.drive_ratio().powi(2);
    let conditional = |b: Branch, block: DVector<C64>, p: f64| -> Result<Option<CatResult>> {
        if p <= 1e-14 {
            return Ok(None);
        }
        let field = FieldState::from_amplitudes(block)?.normalized();
        let reference = cat_reference(params, b, dim)?;
        Ok(Some(CatResult {
            detected: b,
            fidelity_vs_reference: field.fidelity(&reference)?,
            field_state: field,
            probability: p,
            relative_phase,
        }))
    };
    Ok(CatOutcome {
        ground: conditional(Branch::Ground, out.block_g(), p_g)?,
        excited: conditional(Branch::Excited, out.block_e(), p_e)?,
        p_g,
        p_e,
    })
}
