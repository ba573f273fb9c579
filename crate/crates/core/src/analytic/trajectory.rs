//! Phase-space paths of the coherent amplitudes.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;

use super::coeffs::{alpha_resonant, beta_trajectory, InvariantCoeffs};
use super::drive::DriveProfile;
use super::Branch;
use crate::error::{Error, Result};
use crate::export::{write_header, write_row};
use crate::params::SystemParams;

/// e^{i nu t} alpha(t), the amplitude in the frame co-rotating with the drive.
pub fn rotating_frame_amplitude(params: &SystemParams, branch: Branch, t: f64) -> C64 {
    let s = -branch.shift_sign();
    params.drive_ratio() * s * (1.0 - C64::from_polar(1.0, s * params.chi * t))
}

/// (chi/kappa) e^{i nu t} alpha(t) on `t_grid`: the loop 1 - e^{i chi t} for
/// ground and its mirror image for excited.
pub fn phase_space_trajectory(params: &SystemParams, branch: Branch, t_grid: &[f64]) -> Vec<C64> {
    let s = -branch.shift_sign();
    t_grid
        .iter()
        .map(|&t| s * (1.0 - C64::from_polar(1.0, s * params.chi * t)))
        .collect()
}

/// (Re a, Im a, beta) with a the rotating-frame amplitude and beta from the
/// conservation law for a vacuum start.
pub fn hyperboloid_trajectory(
    params: &SystemParams,
    branch: Branch,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let drive = DriveProfile::resonant(params);
    t_grid
        .iter()
        .map(|&t| {
            let a = rotating_frame_amplitude(params, branch, t);
            let beta = beta_trajectory(params, branch, &drive, InvariantCoeffs::vacuum(), t)?;
            Ok((a.re, a.im, beta))
        })
        .collect()
}

/// Net turns of `path` about the origin, counted positive clockwise (the
/// sense of free evolution e^{-i w t}). Samples with modulus below 1e-9 of
/// the path maximum carry no direction and are skipped.
pub fn free_rotation_turns(path: &[C64]) -> f64 {
    let scale = path.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut last: Option<C64> = None;
    let mut angle = 0.0;
    for &z in path {
        if z.norm() <= 1e-9 * scale {
            continue;
        }
        if let Some(prev) = last {
            angle += (z / prev).arg();
        }
        last = Some(z);
    }
    -angle / (2.0 * PI)
}

/// Winding of the excited lab-frame path minus that of the ground path over
/// one cycle chi t in [0, 2 pi], sampled with `samples` points per branch.
pub fn loop_difference(params: &SystemParams, samples: usize) -> Result<i64> {
    let per_turn = 2.0 * PI / (params.nu + params.chi);
    let needed = (8.0 * 2.0 * PI / params.chi / per_turn).ceil() as usize;
    if samples < needed.max(16) {
        return Err(Error::InvalidDimension {
            dim: samples,
            reason: "too few samples to follow the fastest rotation",
        });
    }
    let period = 2.0 * PI / params.chi;
    let turns = |branch| {
        let path: Vec<C64> = (0..samples)
            .map(|k| alpha_resonant(params, branch, period * k as f64 / (samples - 1) as f64))
            .collect();
        free_rotation_turns(&path)
    };
    Ok((turns(Branch::Excited) - turns(Branch::Ground)).round() as i64)
}

/// CSV with header `t,re,im` or `t,re,im,beta`.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    times: &[f64],
    points: &[C64],
    beta: Option<&[f64]>,
) -> Result<()> {
    if times.len() != points.len() {
        return Err(Error::DimensionMismatch {
            left: times.len(),
            right: points.len(),
        });
    }
    if let Some(b) = beta {
        if b.len() != times.len() {
            return Err(Error::DimensionMismatch {
                left: times.len(),
                right: b.len(),
            });
        }
        write_header(out, &["t", "re", "im", "beta"])?;
    } else {
        write_header(out, &["t", "re", "im"])?;
    }
    for (i, (&t, z)) in times.iter().zip(points).enumerate() {
        match beta {
            Some(b) => write_row(out, &[t, z.re, z.im, b[i]])?,
            None => write_row(out, &[t, z.re, z.im])?,
        }
    }
    Ok(())
}
