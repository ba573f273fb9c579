//! Protocol simulations: Ramsey fringes, timing jitter, geometric cat states
//! and the dispersive-approximation check against the Jaynes-Cummings model.

mod cat;
mod pulses;
mod ramsey;
mod validity;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::params::SystemParams;
use crate::propagate::StepperConfig;
use crate::qstate::DEFAULT_DIM;

pub use cat::{cat_generate, cat_reference, CatOutcome, CatResult};
pub use pulses::{pi_half_pulse, pi_half_pulse_phased, RamseyZone};
pub use ramsey::{
    fringe_closed, jitter_closed, jitter_correction, ramsey_fringe_scan, ramsey_jitter, ramsey_run,
    write_fringe_csv, FringeScan, Jitter, RamseyResult, FRINGE_NOTE,
};
pub use validity::{
    dispersive_validity_sweep, validity_control, validity_point, write_validity_csv,
    ValidityRow, LEAKAGE_WARNING,
};

/// Closed-form evaluation or numerical propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Numeric,
}

/// Truncation and stepper used by numeric runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSettings {
    pub dim: usize,
    pub stepper: StepperConfig,
}

impl Default for NumericSettings {
    fn default() -> Self {
        NumericSettings {
            dim: DEFAULT_DIM,
            stepper: StepperConfig::default(),
        }
    }
}

/// Applies exp(+i H0 t) for H0 = nu n + (omega0/2) s_z + chi s_ee, where the
/// chi term only acts for `coupled` of the elapsed `duration`.
pub(crate) fn remove_free_evolution(
    v: &mut DVector<C64>,
    dim: usize,
    params: &SystemParams,
    duration: f64,
    coupled: f64,
) {
    for n in 0..dim {
        let field = params.nu * n as f64 * duration;
        v[n] *= C64::from_polar(1.0, field - params.omega0 / 2.0 * duration);
        v[dim + n] *= C64::from_polar(
            1.0,
            field + params.omega0 / 2.0 * duration + params.chi * coupled,
        );
    }
}
