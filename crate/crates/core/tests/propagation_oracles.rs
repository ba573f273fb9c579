use std::f64::consts::PI;

use geophase::analytic::{geometric_phase_closed, Branch};
use geophase::propagate::{
    extract_total_phase, geometric_phase_numeric, propagate, HamiltonianSpec, StepMethod,
    StepperConfig,
};
use geophase::qstate::{coherent_state, ladder_operators, OperatorMatrix};
use geophase::{DriveProfile, FieldState, JointState, SystemParams, C64};
use nalgebra::DVector;
use proptest::prelude::*;

/// Exact branch state: in the frame rotating at nu the driven Hamiltonian
/// (w - nu) n + kappa (a + a^dagger) is constant.
fn exact_branch(p: &SystemParams, branch: Branch, psi0: &DVector<C64>, t: f64) -> DVector<C64> {
    let dim = psi0.len();
    let l = ladder_operators(dim).unwrap();
    let detune = branch.shifted_frequency(p) - p.nu;
    let h = &l.number.scaled(C64::new(detune, 0.0))
        + &(&l.a + &l.a_dagger).scaled(C64::new(p.kappa, 0.0));
    let mut v = h.unitary_evolution(t).entries() * psi0;
    for n in 0..dim {
        v[n] *= C64::from_polar(1.0, -p.nu * n as f64 * t);
    }
    v
}

fn final_error(method: StepMethod, dt: f64) -> f64 {
    let p = SystemParams::default();
    let dim = 16;
    let spec = HamiltonianSpec::branch(p, Branch::Excited, DriveProfile::resonant(&p), dim).unwrap();
    let cfg = StepperConfig { method, dt, renormalize_every: 0 };
    let psi0 = coherent_state(C64::new(0.2, 0.1), dim).unwrap().into_amplitudes();
    let t = 2.0 * PI;
    let num = propagate(&psi0, &spec, 0.0, t, &cfg, 1).unwrap().state;
    (num - exact_branch(&p, Branch::Excited, &psi0, t)).norm()
}

#[test]
fn rk4_global_error_is_fourth_order() {
    let e: Vec<f64> = [2e-4, 1e-4, 5e-5].iter().map(|&dt| final_error(StepMethod::FixedRk4, dt)).collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((8.0..=32.0).contains(&ratio), "errors {e:?}");
    }
}

#[test]
fn midpoint_exponential_is_second_order() {
    let e: Vec<f64> = [2e-4, 1e-4].iter().map(|&dt| final_error(StepMethod::MidpointExponential, dt)).collect();
    let ratio = e[0] / e[1];
    assert!((3.0..=5.0).contains(&ratio), "errors {e:?}");
    assert!(e[1] < 1e-4);
}

#[test]
fn norm_drift_per_cycle_is_small() {
    let p = SystemParams::default();
    for branch in Branch::BOTH {
        let spec = HamiltonianSpec::branch(p, branch, DriveProfile::resonant(&p), 32).unwrap();
        let ev = propagate(&FieldState::vacuum(32).unwrap(), &spec, 0.0, 2.0 * PI, &StepperConfig::default(), 16)
            .unwrap();
        assert!(ev.max_norm_drift < 1e-8, "{}", ev.max_norm_drift);
    }
}

#[test]
fn renormalization_keeps_unit_norm() {
    let p = SystemParams::default();
    let spec = HamiltonianSpec::branch(p, Branch::Ground, DriveProfile::resonant(&p), 32).unwrap();
    let cfg = StepperConfig { renormalize_every: 100, ..Default::default() };
    let ev = propagate(&FieldState::vacuum(32).unwrap(), &spec, 0.0, 3.0, &cfg, 3).unwrap();
    assert!((ev.state.norm() - 1.0).abs() < 1e-14);
}

#[test]
fn joint_propagation_equals_composed_branches() {
    let p = SystemParams { omega0: 27.0, ..Default::default() };
    let d = DriveProfile::resonant(&p);
    let dim = 32;
    let t = 2.3;
    let (cg, ce) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
    let vac = FieldState::vacuum(dim).unwrap();
    let joint = HamiltonianSpec::joint(p, d.clone(), dim).unwrap();
    let cfg = StepperConfig::default();
    let whole = propagate(&JointState::product(cg, ce, vac.clone()), &joint, 0.0, t, &cfg, 1).unwrap().state;
    let branch = |b| {
        let s = HamiltonianSpec::branch(p, b, d.clone(), dim).unwrap();
        propagate(&vac, &s, 0.0, t, &cfg, 1).unwrap().state
    };
    let composed = JointState::from_branches(&p, cg, ce, branch(Branch::Ground), branch(Branch::Excited), t).unwrap();
    let ov = whole.to_vector().dotc(&composed.to_vector());
    assert!(ov.norm_sqr() > 1.0 - 1e-9, "{}", ov.norm_sqr());
}

#[test]
fn total_phase_over_one_cycle() {
    let p = SystemParams::default();
    let d = DriveProfile::resonant(&p);
    for (branch, expected) in [(Branch::Ground, -PI), (Branch::Excited, PI)] {
        let spec = HamiltonianSpec::branch(p, branch, d.clone(), 32).unwrap();
        let ev = propagate(&FieldState::vacuum(32).unwrap(), &spec, 0.0, 2.0 * PI, &StepperConfig::default(), 128)
            .unwrap();
        let rec = extract_total_phase(&ev.snapshots, &p, branch, &d).unwrap();
        assert!((rec.last_total().unwrap() - expected).abs() < 1e-5, "{branch}: {:?}", rec.last_total());
        assert!(rec.decomposition_defect() < 1e-12);
    }
}

#[test]
fn half_cycle_relative_phase() {
    for &kappa in &[0.25, 0.5, 0.8] {
        let p = SystemParams::default().with_kappa(kappa);
        let d = DriveProfile::resonant(&p);
        let t = PI / p.chi;
        let phase = |b| {
            let spec = HamiltonianSpec::branch(p, b, d.clone(), 32).unwrap();
            let ev = propagate(&FieldState::vacuum(32).unwrap(), &spec, 0.0, t, &StepperConfig::default(), 32)
                .unwrap();
            geometric_phase_numeric(&ev.snapshots, &p, b, &d).unwrap()
        };
        let rel = phase(Branch::Excited) - phase(Branch::Ground);
        assert!((rel - 2.0 * PI * kappa * kappa).abs() < 1e-5, "{kappa}: {rel}");
    }
}

#[test]
fn stationary_spectrum_of_free_joint_state() {
    let p = SystemParams::default();
    let spec = HamiltonianSpec::joint(p, DriveProfile::Zero, 8).unwrap();
    let start = JointState::product(C64::new(1.0, 0.0), C64::new(0.0, 0.0), FieldState::vacuum(8).unwrap());
    let end = propagate(&start, &spec, 0.0, 1.0, &StepperConfig::default(), 1).unwrap().state;
    let ov = start.to_vector().dotc(&end.to_vector());
    assert!((ov.norm() - 1.0).abs() < 1e-10);
    let _ = OperatorMatrix::identity(2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn numeric_geometric_phase_matches_closed_form(nu in 5.0f64..50.0, kappa in 0.1f64..1.0, excited in any::<bool>()) {
        let p = SystemParams { nu, kappa, ..Default::default() };
        let branch = if excited { Branch::Excited } else { Branch::Ground };
        let d = DriveProfile::resonant(&p);
        let dim = 32;
        let spec = HamiltonianSpec::branch(p, branch, d.clone(), dim).unwrap();
        let dt = (0.05 / ((nu + 1.0) * (dim - 1) as f64 + 2.0 * kappa * 6.0)).min(1e-4);
        let cfg = StepperConfig::default().with_dt(dt);
        let t = 2.0 * PI;
        let ev = propagate(&FieldState::vacuum(dim).unwrap(), &spec, 0.0, t, &cfg, 64).unwrap();
        let numeric = geometric_phase_numeric(&ev.snapshots, &p, branch, &d).unwrap();
        let closed = geometric_phase_closed(&p, branch, t);
        prop_assert!((numeric - closed).abs() < 1e-5 * closed.abs().max(1.0), "{numeric} vs {closed}");
    }
}
