use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pulses::{pi_half_pulse, RamseyZone};
use super::{remove_free_evolution, Mode, NumericSettings};
use crate::analytic::{total_phase_closed, Branch, DriveProfile};
use crate::error::{Error, Result};
use crate::export::{write_header, write_row};
use crate::params::SystemParams;
use crate::propagate::{propagate, HamiltonianSpec};
use crate::qstate::{FieldState, JointState};

/// Recorded with every fringe table.
pub const FRINGE_NOTE: &str =
    "fringes are scanned in drive intensity kappa, not in the atom-field interaction time";

const ENTANGLEMENT_TOL: f64 = 1e-6;

/// Detection statistics after the second Ramsey zone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyResult {
    pub kappa: f64,
    pub w_eg_simulated: f64,
    pub w_eg_closed: f64,
    pub p_e: f64,
    pub p_g: f64,
}

impl RamseyResult {
    fn from_state(kappa: f64, closed: f64, state: &JointState) -> Self {
        let (p_g, p_e) = state.populations();
        RamseyResult {
            kappa,
            w_eg_simulated: p_e - p_g,
            w_eg_closed: closed,
            p_e,
            p_g,
        }
    }

    /// |simulated - closed|
    pub fn agreement(&self) -> f64 {
        (self.w_eg_simulated - self.w_eg_closed).abs()
    }
}

/// cos(4 pi kappa^2 / chi^2)
pub fn fringe_closed(params: &SystemParams) -> f64 {
    (4.0 * PI * params.drive_ratio().powi(2)).cos()
}

fn r1_state(dim: usize) -> Result<JointState> {
    let g = JointState::product(C64::new(1.0, 0.0), C64::new(0.0, 0.0), FieldState::vacuum(dim)?);
    Ok(pi_half_pulse(&g, RamseyZone::R1))
}

/// R1, cavity transit for chi t = 2 pi, removal of the free phases, R2.
pub fn ramsey_run(params: &SystemParams, mode: Mode, settings: &NumericSettings) -> Result<RamseyResult> {
    params.validate()?;
    let period = 2.0 * PI / params.chi;
    let closed = fringe_closed(params);
    let after_cavity = match mode {
        Mode::Analytic => {
            // both branches are back at the vacuum, carrying their total phases
            let vac = FieldState::vacuum(settings.dim)?;
            let c = FRAC_1_SQRT_2;
            JointState::new(
                vac.clone(),
                vac,
                C64::from_polar(c, total_phase_closed(params, Branch::Ground, period)),
                C64::from_polar(c, total_phase_closed(params, Branch::Excited, period)),
            )?
        }
        Mode::Numeric => {
            let spec = HamiltonianSpec::joint(*params, DriveProfile::resonant(params), settings.dim)?;
            let start = r1_state(settings.dim)?.to_vector();
            let mut v = propagate(&start, &spec, 0.0, period, &settings.stepper, 1)?.state;
            remove_free_evolution(&mut v, settings.dim, params, period, period);
            JointState::from_vector(&v, settings.dim)?
        }
    };
    let schmidt = after_cavity.schmidt_weight();
    if schmidt < 1.0 - ENTANGLEMENT_TOL {
        return Err(Error::Protocol(format!(
            "atom and field remain entangled after the cycle (Schmidt weight {schmidt})"
        )));
    }
    let out = pi_half_pulse(&after_cavity, RamseyZone::R2);
    Ok(RamseyResult::from_state(params.kappa, closed, &out))
}

/// Fringe results in grid order plus the table note.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub results: Vec<RamseyResult>,
    pub note: String,
}

/// One Ramsey run per kappa, evaluated in parallel and returned in grid order.
pub fn ramsey_fringe_scan(
    params: &SystemParams,
    kappa_grid: &[f64],
    mode: Mode,
    settings: &NumericSettings,
) -> Result<FringeScan> {
    if kappa_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::NonMonotoneGrid);
    }
    let results = kappa_grid
        .par_iter()
        .map(|&k| ramsey_run(&params.with_kappa(k), mode, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeScan {
        results,
        note: FRINGE_NOTE.to_string(),
    })
}

/// `kappa,w_sim,w_closed,p_e,p_g`, plus `agreement = w_closed - w_sim` when requested.
pub fn write_fringe_csv<W: Write>(out: &mut W, results: &[RamseyResult], agreement: bool) -> Result<()> {
    let mut cols = vec!["kappa", "w_sim", "w_closed", "p_e", "p_g"];
    if agreement {
        cols.push("agreement");
    }
    write_header(out, &cols)?;
    for r in results {
        let mut row = vec![r.kappa, r.w_eg_simulated, r.w_eg_closed, r.p_e, r.p_g];
        if agreement {
            row.push(r.w_eg_closed - r.w_eg_simulated);
        }
        write_row(out, &row)?;
    }
    Ok(())
}

/// Whether the atom enters the cavity before or after the drive is aligned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Jitter {
    Early,
    Late,
}

/// Leading-order phase correction: 2 k^2 dt^2 early, k^2 chi dt^3 late.
pub fn jitter_correction(params: &SystemParams, delta_t: f64, which: Jitter) -> f64 {
    let k2 = params.kappa * params.kappa;
    match which {
        Jitter::Early => 2.0 * k2 * delta_t * delta_t,
        Jitter::Late => k2 * params.chi * delta_t.powi(3),
    }
}

/// cos(4 pi k^2/chi^2 - correction)
pub fn jitter_closed(params: &SystemParams, delta_t: f64, which: Jitter) -> f64 {
    (4.0 * PI * params.drive_ratio().powi(2) - jitter_correction(params, delta_t, which)).cos()
}

/// Ramsey run with a mistimed drive. The atom couples to the field on
/// [0, T] with T = 2 pi / chi; the drive keeps its length T but starts at
/// -delta_t (early) or +delta_t (late). `w_eg_closed` carries the
/// leading-order closed form; analytic mode reports it as the simulated value.
pub fn ramsey_jitter(
    params: &SystemParams,
    delta_t: f64,
    which: Jitter,
    mode: Mode,
    settings: &NumericSettings,
) -> Result<RamseyResult> {
    params.validate()?;
    if !(delta_t >= 0.0) {
        return Err(Error::NegativeTime(delta_t));
    }
    if params.chi * delta_t >= 0.1 {
        return Err(Error::OutsideApproximation(params.chi * delta_t));
    }
    let closed = jitter_closed(params, delta_t, which);
    if mode == Mode::Analytic {
        return Ok(RamseyResult {
            kappa: params.kappa,
            w_eg_simulated: closed,
            w_eg_closed: closed,
            p_e: (1.0 + closed) / 2.0,
            p_g: (1.0 - closed) / 2.0,
        });
    }
    let period = 2.0 * PI / params.chi;
    let shift = match which {
        Jitter::Early => -delta_t,
        Jitter::Late => delta_t,
    };
    let (drive_on, drive_off) = (shift, shift + period);
    let mut cuts = vec![0.0, period, drive_on, drive_off];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut v = r1_state(settings.dim)?.to_vector();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = (a + b) / 2.0;
        let coupled = (0.0..period).contains(&mid);
        let driven = (drive_on..drive_off).contains(&mid);
        let p = SystemParams {
            chi: if coupled { params.chi } else { 0.0 },
            ..*params
        };
        let drive = if driven { DriveProfile::resonant(params) } else { DriveProfile::Zero };
        let spec = HamiltonianSpec::joint(p, drive, settings.dim)?;
        v = propagate(&v, &spec, a, b, &settings.stepper, 1)?.state;
    }
    let duration = cuts[cuts.len() - 1] - cuts[0];
    remove_free_evolution(&mut v, settings.dim, params, duration, period);
    let out = pi_half_pulse(&JointState::from_vector(&v, settings.dim)?, RamseyZone::R2);
    Ok(RamseyResult::from_state(params.kappa, closed, &out))
}
