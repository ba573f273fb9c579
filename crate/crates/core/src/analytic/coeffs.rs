use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::drive::DriveProfile;
use super::quadrature::{simpson, DEFAULT_REL_TOL};
use super::Branch;
use crate::error::{Error, Result};
use crate::params::SystemParams;

const I: C64 = C64::new(0.0, 1.0);

/// Parameters (alpha, beta) of the invariant
/// I(t) = a^dagger a - alpha a^dagger - alpha* a + beta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCoeffs {
    pub alpha: C64,
    pub beta: f64,
}

impl InvariantCoeffs {
    pub fn new(alpha: C64, beta: f64) -> Self {
        InvariantCoeffs { alpha, beta }
    }

    pub fn vacuum() -> Self {
        InvariantCoeffs {
            alpha: C64::new(0.0, 0.0),
            beta: 0.0,
        }
    }

    /// beta - |alpha|^2, constant along every trajectory.
    pub fn conserved(&self) -> f64 {
        self.beta - self.alpha.norm_sqr()
    }

    /// Lowest eigenvalue of the untruncated invariant.
    pub fn ground_eigenvalue(&self) -> f64 {
        self.conserved()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// integral_0^t e^{i d s} ds
fn oscillating_integral(d: f64, t: f64) -> C64 {
    let x = d * t;
    if x.abs() < 1e-6 {
        // series keeps relative accuracy near resonance
        t * (1.0 + I * x / 2.0 - x * x / 6.0)
    } else {
        (C64::from_polar(1.0, x) - 1.0) / (I * d)
    }
}

pub(crate) fn alpha_unchecked(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    alpha0: C64,
    t: f64,
) -> C64 {
    let w = branch.shifted_frequency(params);
    let rot = C64::from_polar(1.0, -w * t);
    let forced = match drive {
        DriveProfile::Zero => C64::new(0.0, 0.0),
        DriveProfile::Resonant { kappa, nu } => *kappa * oscillating_integral(w - nu, t),
        DriveProfile::Sampled(s) => {
            let g = |x: f64| C64::from_polar(1.0, w * x) * s.eval(x);
            let mut nodes = vec![0.0];
            nodes.extend(s.times().iter().copied().filter(|&x| x > 0.0 && x < t));
            nodes.push(t);
            nodes
                .windows(2)
                .map(|p| (g(p[0]) + g(p[1])) * (0.5 * (p[1] - p[0])))
                .sum()
        }
    };
    rot * (alpha0 - I * forced)
}

/// alpha(t) = alpha(0) e^{-i w t} - i e^{-i w t} integral_0^t e^{i w s} f(s) ds,
/// with w the branch-shifted frequency. Resonant drives are evaluated in
/// closed form; sampled drives use trapezoidal quadrature on their grid.
pub fn alpha_general(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    alpha0: C64,
    t: f64,
) -> Result<C64> {
    check_time(t)?;
    Ok(alpha_unchecked(params, branch, drive, alpha0, t))
}

/// Coherent amplitude for a resonant drive and vacuum start:
/// ground  +(kappa/chi) e^{-i nu t} (1 - e^{+i chi t}),
/// excited -(kappa/chi) e^{-i nu t} (1 - e^{-i chi t}).
pub fn alpha_resonant(params: &SystemParams, branch: Branch, t: f64) -> C64 {
    let ratio = params.kappa / params.chi;
    let s = -branch.shift_sign(); // +1 ground, -1 excited
    let carrier = C64::from_polar(1.0, -params.nu * t);
    s * ratio * carrier * (1.0 - C64::from_polar(1.0, s * params.chi * t))
}

/// beta(t) from the conservation law beta - |alpha|^2 = const.
pub fn beta_trajectory(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    coeffs0: InvariantCoeffs,
    t: f64,
) -> Result<f64> {
    let alpha = alpha_general(params, branch, drive, coeffs0.alpha, t)?;
    Ok(alpha.norm_sqr() + coeffs0.conserved())
}

/// beta(t) by direct quadrature of d beta/dt = i alpha f* - i alpha* f.
pub fn beta_quadrature(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    coeffs0: InvariantCoeffs,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    let rate = |s: f64| {
        let a = alpha_unchecked(params, branch, drive, coeffs0.alpha, s);
        -2.0 * (a * drive.eval(s).conj()).im
    };
    Ok(coeffs0.beta + simpson(rate, 0.0, t, DEFAULT_REL_TOL)?)
}

/// RK4 integration of the coefficient equations
/// d alpha/dt = -i w alpha - i f, d beta/dt = i alpha f* - i alpha* f.
/// Returns the `steps + 1` samples including both endpoints.
pub fn integrate_coefficients(
    params: &SystemParams,
    branch: Branch,
    drive: &DriveProfile,
    coeffs0: InvariantCoeffs,
    t: f64,
    steps: usize,
) -> Result<Vec<(f64, InvariantCoeffs)>> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::InvalidDimension {
            dim: 0,
            reason: "coefficient integration needs at least one step",
        });
    }
    let w = branch.shifted_frequency(params);
    let rhs = |s: f64, a: C64| -> (C64, f64) {
        let f = drive.eval(s);
        (-I * w * a - I * f, -2.0 * (a * f.conj()).im)
    };
    let h = t / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let (mut a, mut b) = (coeffs0.alpha, coeffs0.beta);
    out.push((0.0, coeffs0));
    for k in 0..steps {
        let s = k as f64 * h;
        let (ka1, kb1) = rhs(s, a);
        let (ka2, kb2) = rhs(s + h / 2.0, a + ka1 * (h / 2.0));
        let (ka3, kb3) = rhs(s + h / 2.0, a + ka2 * (h / 2.0));
        let (ka4, kb4) = rhs(s + h, a + ka3 * h);
        a += (ka1 + ka2 * 2.0 + ka3 * 2.0 + ka4) * (h / 6.0);
        b += (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4) * (h / 6.0);
        out.push(((k + 1) as f64 * h, InvariantCoeffs::new(a, b)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::SampledDrive;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn std_params() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn unforced_vacuum_stays_at_origin() {
        let p = std_params();
        for &t in &[0.0, 1.0, 17.3] {
            let a = alpha_general(&p, Branch::Ground, &DriveProfile::Zero, C64::new(0.0, 0.0), t)
                .unwrap();
            assert_eq!(a, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn negative_time_is_a_domain_error() {
        let p = std_params();
        let err = alpha_general(&p, Branch::Ground, &DriveProfile::Zero, C64::new(0.0, 0.0), -1.0)
            .unwrap_err();
        assert_eq!(err.tag(), "domain");
    }

    #[test]
    fn half_cycle_modulus_is_sqrt2() {
        let p = std_params();
        let d = DriveProfile::resonant(&p);
        let a = alpha_general(&p, Branch::Ground, &d, C64::new(0.0, 0.0), PI).unwrap();
        assert!((a.norm() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn excited_full_cycle_returns_to_origin() {
        let p = std_params();
        let d = DriveProfile::resonant(&p);
        let a = alpha_general(&p, Branch::Excited, &d, C64::new(0.0, 0.0), 2.0 * PI).unwrap();
        assert!(a.norm() < 1e-12);
        // independent route: trapezoidal quadrature of the same integral on a fine sampled drive
        let n = 20000;
        let times: Vec<f64> = (0..=n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        let values = times.iter().map(|&t| d.eval(t)).collect();
        let sampled = DriveProfile::Sampled(SampledDrive::new(times, values).unwrap());
        let b = alpha_general(&p, Branch::Excited, &sampled, C64::new(0.0, 0.0), 2.0 * PI)
            .unwrap();
        assert!(b.norm() < 1e-6, "{b}");
    }

    #[test]
    fn resonant_closed_form_matches_general() {
        let p = SystemParams {
            nu: 13.0,
            chi: 0.7,
            kappa: 0.4,
            ..Default::default()
        };
        let d = DriveProfile::resonant(&p);
        for branch in Branch::BOTH {
            for k in 0..50 {
                let t = 0.37 * k as f64;
                let g = alpha_general(&p, branch, &d, C64::new(0.0, 0.0), t).unwrap();
                assert!((alpha_resonant(&p, branch, t) - g).norm() < 1e-12, "{branch} t={t}");
            }
        }
    }

    #[test]
    fn rotating_frame_half_cycle_amplitudes() {
        let p = std_params();
        let t = PI;
        let rot = C64::from_polar(1.0, p.nu * t);
        let g = alpha_resonant(&p, Branch::Ground, t) * rot;
        let e = alpha_resonant(&p, Branch::Excited, t) * rot;
        let two_ratio = 2.0 * p.kappa / p.chi;
        assert!((g - two_ratio).norm() < 1e-12);
        assert!((e + two_ratio).norm() < 1e-12);
        assert_eq!(alpha_resonant(&p, Branch::Ground, 0.0), C64::new(0.0, 0.0));
        assert_eq!(alpha_resonant(&p, Branch::Excited, 0.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn periodic_loop_closure() {
        let p = std_params();
        for branch in Branch::BOTH {
            for n in 1..=3 {
                let t = 2.0 * PI * n as f64 / p.chi;
                assert!(alpha_resonant(&p, branch, t).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn negating_chi_swaps_branches() {
        let p = SystemParams {
            chi: 0.8,
            kappa: 0.5,
            ..Default::default()
        };
        let flipped = SystemParams { chi: -p.chi, ..p };
        for k in 0..40 {
            let t = 0.21 * k as f64;
            let g_flipped = alpha_resonant(&flipped, Branch::Ground, t);
            let e = alpha_resonant(&p, Branch::Excited, t);
            assert!((g_flipped - e).norm() < 1e-14);
            let e_flipped = alpha_resonant(&flipped, Branch::Excited, t);
            let g = alpha_resonant(&p, Branch::Ground, t);
            assert!((e_flipped - g).norm() < 1e-14);
        }
    }

    #[test]
    fn beta_examples() {
        let p = std_params();
        let d = DriveProfile::resonant(&p);
        let v = InvariantCoeffs::vacuum();
        for &t in &[0.4, 1.9, 5.0] {
            let a = alpha_general(&p, Branch::Excited, &d, C64::new(0.0, 0.0), t).unwrap();
            let b = beta_trajectory(&p, Branch::Excited, &d, v, t).unwrap();
            assert_eq!(b, a.norm_sqr());
        }
        let b = beta_trajectory(&p, Branch::Ground, &d, v, PI).unwrap();
        assert!((b - 2.0).abs() < 1e-12);
        let bq = beta_quadrature(&p, Branch::Ground, &d, v, PI).unwrap();
        assert!((bq - 2.0).abs() < 1e-8);

        let c0 = InvariantCoeffs::new(C64::new(0.3, -0.2), 0.9);
        for &t in &[0.0, 2.5, 11.0] {
            let b = beta_trajectory(&p, Branch::Ground, &DriveProfile::Zero, c0, t).unwrap();
            assert!((b - 0.9).abs() < 1e-14);
        }
    }

    #[test]
    fn beta_quadrature_agrees_with_conservation() {
        let p = std_params();
        let d = DriveProfile::resonant(&p);
        let c0 = InvariantCoeffs::new(C64::new(0.3, 0.1), 0.5);
        for branch in Branch::BOTH {
            for &t in &[0.7, 3.0, 6.0] {
                let a = beta_trajectory(&p, branch, &d, c0, t).unwrap();
                let b = beta_quadrature(&p, branch, &d, c0, t).unwrap();
                assert!((a - b).abs() < 1e-8, "{branch} {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rk4_coefficients_match_closed_form() {
        let p = SystemParams {
            kappa: FRAC_1_SQRT_2,
            ..Default::default()
        };
        let d = DriveProfile::resonant(&p);
        let path = integrate_coefficients(&p, Branch::Ground, &d, InvariantCoeffs::vacuum(), 2.0 * PI, 20000)
            .unwrap();
        for (t, c) in path.iter().step_by(1000) {
            let exact = alpha_resonant(&p, Branch::Ground, *t);
            assert!((c.alpha - exact).norm() < 1e-9);
            assert!(c.conserved().abs() < 1e-9);
        }
    }

    fn smooth_drive(seed_amps: &[(f64, f64, f64)]) -> DriveProfile {
        let n = 4000;
        let t_end = 4.0;
        let times: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
        let values = times
            .iter()
            .map(|&t| {
                seed_amps
                    .iter()
                    .enumerate()
                    .map(|(k, &(re, im, phase))| {
                        C64::new(re, im) * C64::from_polar(1.0, (k as f64 + 1.0) * t + phase)
                    })
                    .sum()
            })
            .collect();
        DriveProfile::Sampled(SampledDrive::new(times, values).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn conservation_along_random_smooth_drive(
            amps in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5, 0.0f64..6.0), 3),
            a0re in -0.5f64..0.5, a0im in -0.5f64..0.5, b0 in -1.0f64..1.0,
            ground in any::<bool>(),
        ) {
            let p = std_params();
            let drive = smooth_drive(&amps);
            let branch = if ground { Branch::Ground } else { Branch::Excited };
            let c0 = InvariantCoeffs::new(C64::new(a0re, a0im), b0);
            let path = integrate_coefficients(&p, branch, &drive, c0, 4.0, 40000).unwrap();
            for (_, c) in &path {
                prop_assert!((c.conserved() - c0.conserved()).abs() < 1e-8);
            }
        }
    }
}
