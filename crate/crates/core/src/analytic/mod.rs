//! Closed-form Lewis-Riesenfeld solution of the driven, dispersively shifted
//! oscillator: invariant coefficients, coherent amplitudes, geometric and
//! dynamic phases, and the phase-space trajectory exports.

mod coeffs;
mod drive;
mod phases;
pub mod quadrature;
mod record;
mod trajectory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::params::SystemParams;

pub use coeffs::{
    alpha_general, alpha_resonant, beta_quadrature, beta_trajectory, integrate_coefficients,
    InvariantCoeffs,
};
pub use drive::{DriveProfile, SampledDrive};
pub use phases::{
    connection_finite_difference, dynamic_phase_closed, dynamic_phase_quadrature,
    dynamic_phase_quadrature_from, geometric_phase_closed, geometric_phase_quadrature,
    geometric_phase_quadrature_from, total_phase_closed,
};
pub use record::{unwrap_phases, PhaseRecord};
pub use trajectory::{
    free_rotation_turns, hyperboloid_trajectory, loop_difference, phase_space_trajectory,
    rotating_frame_amplitude, write_trajectory_csv,
};

/// Atomic level conditioning one field branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Ground,
    Excited,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Ground, Branch::Excited];

    /// Shifted field frequency: nu - chi for ground, nu + chi for excited.
    pub fn shifted_frequency(self, params: &SystemParams) -> f64 {
        match self {
            Branch::Ground => params.nu - params.chi,
            Branch::Excited => params.nu + params.chi,
        }
    }

    /// Sign of the dispersive shift: -1 for ground, +1 for excited.
    pub fn shift_sign(self) -> f64 {
        match self {
            Branch::Ground => -1.0,
            Branch::Excited => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Ground => "g",
            Branch::Excited => "e",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g" | "ground" => Ok(Branch::Ground),
            "e" | "excited" => Ok(Branch::Excited),
            other => Err(format!("unknown branch `{other}` (expected g or e)")),
        }
    }
}
