use std::io::Write;

use num_complex::Complex64 as C64;

use super::stepper::Snapshots;
use crate::analytic::{alpha_general, unwrap_phases, Branch, DriveProfile, InvariantCoeffs, PhaseRecord};
use crate::error::{Error, Result};
use crate::export::{write_header, write_row};
use crate::params::SystemParams;
use crate::qstate::{displaced_number_state, ladder_operators, overlap, FieldState, OperatorMatrix};

const MIN_OVERLAP: f64 = 1.0 - 1e-6;

/// Unwrapped arg <0,t|Phi(t)> against the analytic displaced vacuum for
/// branch snapshots started from vacuum at t = 0. The dynamic part is filled
/// by quadrature and the geometric part is the remainder.
pub fn extract_total_phase(
    snapshots: &Snapshots,
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
) -> Result<PhaseRecord> {
    let mut wrapped = Vec::with_capacity(snapshots.len());
    for (&t, psi) in snapshots.times.iter().zip(&snapshots.states) {
        let alpha = alpha_general(params, branch, drive, C64::new(0.0, 0.0), t)?;
        let reference = displaced_number_state(alpha, 0, psi.len())?;
        let ov = overlap(&reference, &FieldState::from_amplitudes(psi.clone())?)?;
        if ov.norm() < MIN_OVERLAP {
            return Err(Error::Fidelity { t, modulus: ov.norm() });
        }
        wrapped.push(ov.arg());
    }
    let (total, unwrap_jumps) = unwrap_phases(&wrapped, &snapshots.times)?;
    let mut record = PhaseRecord::quadrature(params, branch, drive, C64::new(0.0, 0.0), &snapshots.times)?;
    record.geometric = total.iter().zip(&record.dynamic).map(|(t, d)| t - d).collect();
    record.total = total;
    record.unwrap_jumps = unwrap_jumps;
    Ok(record)
}

/// Numeric total phase at the last snapshot minus the quadrature dynamic phase.
pub fn geometric_phase_numeric(
    snapshots: &Snapshots,
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
) -> Result<f64> {
    let record = extract_total_phase(snapshots, params, branch, drive)?;
    record
        .last_geometric()
        .ok_or(Error::InvalidDimension { dim: 0, reason: "no snapshots" })
}

/// a^dagger a - alpha a^dagger - alpha* a + beta.
pub fn invariant_matrix(coeffs: &InvariantCoeffs, dim: usize) -> Result<OperatorMatrix> {
    let l = ladder_operators(dim)?;
    let shift = &l.a_dagger.scaled(coeffs.alpha) + &l.a.scaled(coeffs.alpha.conj());
    let m = &(&l.number - &shift) + &OperatorMatrix::identity(dim).scaled(C64::new(coeffs.beta, 0.0));
    m.ensure_hermitian(1e-12)
}

/// CSV with a `t` column followed by `re_k,im_k` for every amplitude.
pub fn write_snapshot_csv<W: Write>(out: &mut W, snapshots: &Snapshots) -> Result<()> {
    let n = snapshots.states.first().map_or(0, |s| s.len());
    let mut columns = vec!["t".to_string()];
    for k in 0..n {
        columns.push(format!("re_{k}"));
        columns.push(format!("im_{k}"));
    }
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    write_header(out, &refs)?;
    let mut row = Vec::with_capacity(2 * n + 1);
    for (&t, psi) in snapshots.times.iter().zip(&snapshots.states) {
        if psi.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: psi.len() });
        }
        row.clear();
        row.push(t);
        for z in psi.iter() {
            row.push(z.re);
            row.push(z.im);
        }
        write_row(out, &row)?;
    }
    Ok(())
}
