//! Geometric and dynamic phases of the displaced-vacuum track.

use num_complex::Complex64 as C64;

use super::coeffs::alpha_unchecked;
use super::drive::DriveProfile;
use super::quadrature::{simpson, DEFAULT_REL_TOL};
use super::Branch;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::qstate::{displaced_number_state, overlap};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// t - sin(chi t) / chi, with a series near t = 0 to avoid cancellation.
fn cycle_profile(chi: f64, t: f64) -> f64 {
    let x = chi * t;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        t * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        t - x.sin() / chi
    }
}

/// (2 nu -/+ chi)(kappa/chi)^2 [t - sin(chi t)/chi], minus for ground.
pub fn geometric_phase_closed(params: &SystemParams, branch: Branch, t: f64) -> f64 {
    let r2 = params.drive_ratio().powi(2);
    (2.0 * params.nu + branch.shift_sign() * params.chi) * r2 * cycle_profile(params.chi, t)
}

/// -2 nu (kappa/chi)^2 [t - sin(chi t)/chi], the same for both branches.
pub fn dynamic_phase_closed(params: &SystemParams, t: f64) -> f64 {
    let r2 = params.drive_ratio().powi(2);
    -2.0 * params.nu * r2 * cycle_profile(params.chi, t)
}

/// Sum of the closed-form dynamic and geometric phases.
pub fn total_phase_closed(params: &SystemParams, branch: Branch, t: f64) -> f64 {
    let r2 = params.drive_ratio().powi(2);
    branch.shift_sign() * params.chi * r2 * cycle_profile(params.chi, t)
}

/// d(phi^G)/dt = -Im(alpha* d alpha/dt), with d alpha/dt from the coefficient equation.
pub(crate) fn geometric_rate<'a>(
    params: &'a SystemParams,
    branch: Branch,
    drive: &'a DriveProfile,
    alpha0: C64,
) -> impl Fn(f64) -> f64 + 'a {
    let w = branch.shifted_frequency(params);
    move |s| {
        let a = alpha_unchecked(params, branch, drive, alpha0, s);
        let rate = -I * w * a - I * drive.eval(s);
        -(a.conj() * rate).im
    }
}

/// d(phi^D)/dt = -<0,t|H|0,t> = -(w |alpha|^2 + 2 Re(f alpha*)).
pub(crate) fn dynamic_rate<'a>(
    params: &'a SystemParams,
    branch: Branch,
    drive: &'a DriveProfile,
    alpha0: C64,
) -> impl Fn(f64) -> f64 + 'a {
    let w = branch.shifted_frequency(params);
    move |s| {
        let a = alpha_unchecked(params, branch, drive, alpha0, s);
        -(w * a.norm_sqr() + 2.0 * (drive.eval(s) * a.conj()).re)
    }
}

/// -integral_0^t Im(alpha* d alpha/dt) along the vacuum-start trajectory.
pub fn geometric_phase_quadrature(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    t: f64,
) -> Result<f64> {
    geometric_phase_quadrature_from(params, branch, drive, ZERO, t)
}

/// Geometric phase of the displaced-vacuum track starting at `alpha0`.
pub fn geometric_phase_quadrature_from(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    alpha0: C64,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    simpson(geometric_rate(params, branch, drive, alpha0), 0.0, t, DEFAULT_REL_TOL)
}

/// -integral_0^t (w |alpha|^2 + 2 Re(f alpha*)) along the vacuum-start trajectory.
pub fn dynamic_phase_quadrature(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    t: f64,
) -> Result<f64> {
    dynamic_phase_quadrature_from(params, branch, drive, ZERO, t)
}

/// Dynamic phase of the displaced-vacuum track starting at `alpha0`.
pub fn dynamic_phase_quadrature_from(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    alpha0: C64,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    simpson(dynamic_rate(params, branch, drive, alpha0), 0.0, t, DEFAULT_REL_TOL)
}

/// i <0,t| d/dt |0,t> by central differences of truncated displaced-vacuum
/// overlaps. Falls back to a one-sided difference when `t < h`.
pub fn connection_finite_difference(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    t: f64,
    h: f64,
    dim: usize,
) -> Result<f64> {
    check_time(t)?;
    let state = |s: f64| {
        displaced_number_state(alpha_unchecked(params, branch, drive, ZERO, s), 0, dim)
    };
    let here = state(t)?;
    let lo = (t - h).max(0.0);
    let hi = t + h;
    let forward = overlap(&here, &state(hi)?)?;
    let backward = overlap(&here, &state(lo)?)?;
    let derivative = (forward - backward) / (hi - lo);
    Ok((I * derivative).re)
}
