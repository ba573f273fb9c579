//! Physical constants of the driven dispersive model.
//!
//! All simulations in this crate are expressed in chi-scaled units (chi = 1)
//! unless the caller chooses otherwise; the closed forms hold for any units
//! as long as frequencies and inverse times agree.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Field mode angular frequency.
    pub nu: f64,
    /// Atomic transition frequency.
    pub omega0: f64,
    /// Effective dispersive coupling.
    pub chi: f64,
    /// Drive amplitude magnitude, f(t) = kappa e^{-i nu t}.
    pub kappa: f64,
    /// Dipole Rabi coupling; only the Rabi-model oracle reads it.
    pub g_rabi: f64,
    /// Entry/exit timing jitter; only the jitter experiments read it.
    pub delta_t_jitter: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            nu: 20.0,
            omega0: 30.0,
            chi: 1.0,
            kappa: FRAC_1_SQRT_2,
            g_rabi: 0.0,
            delta_t_jitter: 0.0,
        }
    }
}

/// Non-fatal diagnostics about the dispersive approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegimeAdvisory {
    /// (g / (nu - omega0))^2 is not small.
    WeakDetuning { g_over_delta_sq: f64 },
    /// The drive is stronger than the dispersive coupling.
    DriveExceedsCoupling { kappa: f64, chi: f64 },
}

impl SystemParams {
    pub fn with_kappa(self, kappa: f64) -> Self {
        SystemParams { kappa, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.nu,
            self.omega0,
            self.chi,
            self.kappa,
            self.g_rabi,
            self.delta_t_jitter,
        ];
        if let Some(bad) = finite.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation {
                constraint: "all parameters finite",
                value: *bad,
            });
        }
        if self.chi <= 0.0 {
            return Err(Error::Validation {
                constraint: "chi > 0",
                value: self.chi,
            });
        }
        if self.nu <= 0.0 {
            return Err(Error::Validation {
                constraint: "nu > 0",
                value: self.nu,
            });
        }
        if self.kappa < 0.0 {
            return Err(Error::Validation {
                constraint: "kappa >= 0",
                value: self.kappa,
            });
        }
        if self.delta_t_jitter < 0.0 {
            return Err(Error::Validation {
                constraint: "delta_t_jitter >= 0",
                value: self.delta_t_jitter,
            });
        }
        Ok(())
    }

    /// Atom-field detuning, nu - omega0.
    pub fn detuning(&self) -> f64 {
        self.nu - self.omega0
    }

    /// Kappa / chi, the only drive scale the resonant closed forms depend on.
    pub fn drive_ratio(&self) -> f64 {
        self.kappa / self.chi
    }

    pub fn advisories(&self) -> Vec<RegimeAdvisory> {
        let mut out = Vec::new();
        let delta = self.detuning();
        if self.g_rabi != 0.0 {
            let ratio = if delta == 0.0 {
                f64::INFINITY
            } else {
                (self.g_rabi / delta).powi(2)
            };
            if ratio >= 0.1 {
                out.push(RegimeAdvisory::WeakDetuning {
                    g_over_delta_sq: ratio,
                });
            }
        }
        if self.kappa > self.chi {
            out.push(RegimeAdvisory::DriveExceedsCoupling {
                kappa: self.kappa,
                chi: self.chi,
            });
        }
        out
    }
}
