use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::drive::DriveProfile;
use super::phases::{
    dynamic_phase_closed, dynamic_rate, geometric_phase_closed, geometric_rate,
};
use super::quadrature::{simpson, DEFAULT_REL_TOL};
use super::Branch;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Phase history of one branch on a sampled time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub dynamic: Vec<f64>,
    pub geometric: Vec<f64>,
    /// Number of 2 pi corrections applied while unwrapping `total`.
    pub unwrap_jumps: usize,
}

fn check_grid(times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|t| **t < 0.0 || t.is_nan()) {
        return Err(Error::NegativeTime(t));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::NonMonotoneGrid);
    }
    Ok(())
}

impl PhaseRecord {
    /// Closed-form phases for the resonant drive and vacuum start.
    pub fn closed_form(params: &SystemParams, branch: Branch, times: &[f64]) -> Result<Self> {
        check_grid(times)?;
        let dynamic: Vec<f64> = times.iter().map(|&t| dynamic_phase_closed(params, t)).collect();
        let geometric: Vec<f64> = times
            .iter()
            .map(|&t| geometric_phase_closed(params, branch, t))
            .collect();
        let total = dynamic.iter().zip(&geometric).map(|(d, g)| d + g).collect();
        Ok(PhaseRecord {
            times: times.to_vec(),
            total,
            dynamic,
            geometric,
            unwrap_jumps: 0,
        })
    }

    /// Phases by cumulative quadrature between consecutive grid points,
    /// starting from 0 at t = 0.
    pub fn quadrature(
        params: &SystemParams,
        branch: Branch,
        drive: &DriveProfile,
        alpha0: C64,
        times: &[f64],
    ) -> Result<Self> {
        check_grid(times)?;
        let g_rate = geometric_rate(params, branch, drive, alpha0);
        let d_rate = dynamic_rate(params, branch, drive, alpha0);
        let mut geometric = Vec::with_capacity(times.len());
        let mut dynamic = Vec::with_capacity(times.len());
        let (mut g, mut d, mut prev) = (0.0, 0.0, 0.0);
        for &t in times {
            g += simpson(&g_rate, prev, t, DEFAULT_REL_TOL)?;
            d += simpson(&d_rate, prev, t, DEFAULT_REL_TOL)?;
            prev = t;
            geometric.push(g);
            dynamic.push(d);
        }
        let total = dynamic.iter().zip(&geometric).map(|(d, g)| d + g).collect();
        Ok(PhaseRecord {
            times: times.to_vec(),
            total,
            dynamic,
            geometric,
            unwrap_jumps: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// max_i |total - dynamic - geometric|.
    pub fn decomposition_defect(&self) -> f64 {
        self.total
            .iter()
            .zip(&self.dynamic)
            .zip(&self.geometric)
            .map(|((t, d), g)| (t - d - g).abs())
            .fold(0.0, f64::max)
    }

    pub fn last_total(&self) -> Option<f64> {
        self.total.last().copied()
    }

    pub fn last_geometric(&self) -> Option<f64> {
        self.geometric.last().copied()
    }
}

/// Nearest-2 pi continuation of wrapped phases. Returns the unwrapped series
/// and the number of 2 pi corrections. A continued step of pi/2 or more is
/// ambiguous and reported as a sampling error at that sample's time.
pub fn unwrap_phases(wrapped: &[f64], times: &[f64]) -> Result<(Vec<f64>, usize)> {
    if wrapped.len() != times.len() {
        return Err(Error::DimensionMismatch {
            left: wrapped.len(),
            right: times.len(),
        });
    }
    let mut out = Vec::with_capacity(wrapped.len());
    let mut jumps = 0usize;
    let mut offset = 0.0;
    for (i, &w) in wrapped.iter().enumerate() {
        if i == 0 {
            out.push(w);
            continue;
        }
        let prev = out[i - 1];
        let raw = w + offset - prev;
        let k = (raw / (2.0 * PI)).round();
        if k != 0.0 {
            offset -= 2.0 * PI * k;
            jumps += k.abs() as usize;
        }
        let step = w + offset - prev;
        if step.abs() >= FRAC_PI_2 {
            return Err(Error::Sampling { t: times[i], step });
        }
        out.push(w + offset);
    }
    Ok((out, jumps))
}
