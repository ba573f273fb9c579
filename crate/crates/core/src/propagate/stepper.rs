use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{CompiledHamiltonian, HamiltonianSpec};
use crate::error::{Error, Result};
use crate::qstate::{FieldState, JointState};

const MAX_DRIFT: f64 = 1e-6;
const RESOLUTION_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMethod {
    FixedRk4,
    /// exp(-i H(t + dt/2) dt) applied by a Taylor series on the state.
    MidpointExponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub method: StepMethod,
    pub dt: f64,
    /// Renormalize after this many steps; 0 never renormalizes.
    pub renormalize_every: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            method: StepMethod::FixedRk4,
            dt: 1e-4,
            renormalize_every: 0,
        }
    }
}

impl StepperConfig {
    pub fn with_dt(self, dt: f64) -> Self {
        StepperConfig { dt, ..self }
    }

    /// Rejects steps that do not resolve the fastest oscillation of `h`:
    /// dt * (spectral bound) must stay below 0.1.
    pub fn check(&self, h: &CompiledHamiltonian) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::StepperConfig(format!("dt must be positive, got {}", self.dt)));
        }
        let product = self.dt * h.spectral_bound();
        if product >= RESOLUTION_LIMIT {
            return Err(Error::StepperConfig(format!(
                "dt = {} times spectral scale {:.4} is {:.4}, must be < {RESOLUTION_LIMIT}",
                self.dt,
                h.spectral_bound(),
                product
            )));
        }
        Ok(())
    }
}

/// States recorded on a uniform time grid, both endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshots {
    pub times: Vec<f64>,
    pub states: Vec<DVector<C64>>,
}

impl Snapshots {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&DVector<C64>> {
        self.states.last()
    }
}

/// Result of a propagation run.
#[derive(Clone, Debug)]
pub struct Evolution<S> {
    pub state: S,
    pub snapshots: Snapshots,
    /// Largest |norm - initial norm| seen before any renormalization.
    pub max_norm_drift: f64,
    pub steps: usize,
}

/// States that map to and from the stepper's flat vectors.
pub trait StateVector: Sized {
    fn to_flat(&self) -> DVector<C64>;
    fn from_flat(v: DVector<C64>, spec: &HamiltonianSpec) -> Result<Self>;
}

impl StateVector for DVector<C64> {
    fn to_flat(&self) -> DVector<C64> {
        self.clone()
    }

    fn from_flat(v: DVector<C64>, _: &HamiltonianSpec) -> Result<Self> {
        Ok(v)
    }
}

impl StateVector for FieldState {
    fn to_flat(&self) -> DVector<C64> {
        self.amplitudes().clone()
    }

    fn from_flat(v: DVector<C64>, _: &HamiltonianSpec) -> Result<Self> {
        FieldState::from_amplitudes(v)
    }
}

impl StateVector for JointState {
    fn to_flat(&self) -> DVector<C64> {
        self.to_vector()
    }

    fn from_flat(v: DVector<C64>, spec: &HamiltonianSpec) -> Result<Self> {
        JointState::from_vector(&v, spec.dim)
    }
}

struct Workspace {
    k: [DVector<C64>; 4],
    tmp: DVector<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = DVector::from_element(n, C64::new(0.0, 0.0));
        Workspace {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }
}

const MINUS_I: C64 = C64::new(0.0, -1.0);

fn rk4_step(h: &CompiledHamiltonian, t: f64, dt: f64, psi: &mut DVector<C64>, w: &mut Workspace) {
    let [k1, k2, k3, k4] = &mut w.k;
    h.apply(t, psi, k1);
    k1.scale_mut_c(MINUS_I);
    w.tmp.copy_from(psi);
    w.tmp.axpy(C64::new(dt / 2.0, 0.0), k1, C64::new(1.0, 0.0));
    h.apply(t + dt / 2.0, &w.tmp, k2);
    k2.scale_mut_c(MINUS_I);
    w.tmp.copy_from(psi);
    w.tmp.axpy(C64::new(dt / 2.0, 0.0), k2, C64::new(1.0, 0.0));
    h.apply(t + dt / 2.0, &w.tmp, k3);
    k3.scale_mut_c(MINUS_I);
    w.tmp.copy_from(psi);
    w.tmp.axpy(C64::new(dt, 0.0), k3, C64::new(1.0, 0.0));
    h.apply(t + dt, &w.tmp, k4);
    k4.scale_mut_c(MINUS_I);
    let c = C64::new(dt / 6.0, 0.0);
    psi.axpy(c, k1, C64::new(1.0, 0.0));
    psi.axpy(c * 2.0, k2, C64::new(1.0, 0.0));
    psi.axpy(c * 2.0, k3, C64::new(1.0, 0.0));
    psi.axpy(c, k4, C64::new(1.0, 0.0));
}

fn midpoint_step(h: &CompiledHamiltonian, t: f64, dt: f64, psi: &mut DVector<C64>, w: &mut Workspace) {
    let tm = t + dt / 2.0;
    let [term, next, _, _] = &mut w.k;
    term.copy_from(psi);
    let mut order = 1.0;
    loop {
        h.apply(tm, term, next);
        next.scale_mut_c(MINUS_I * (dt / order));
        std::mem::swap(term, next);
        *psi += &*term;
        if term.norm() <= 1e-17 * psi.norm() || order > 60.0 {
            break;
        }
        order += 1.0;
    }
}

trait ScaleC {
    fn scale_mut_c(&mut self, c: C64);
}

impl ScaleC for DVector<C64> {
    fn scale_mut_c(&mut self, c: C64) {
        for z in self.iter_mut() {
            *z *= c;
        }
    }
}

/// Integrates i d/dt psi = H(t) psi from `t0` to `t1`, recording `samples + 1`
/// snapshots on a uniform grid. The step count is the smallest multiple of
/// `samples` whose step does not exceed `cfg.dt`.
pub fn propagate<S: StateVector>(
    initial: &S,
    spec: &HamiltonianSpec,
    t0: f64,
    t1: f64,
    cfg: &StepperConfig,
    samples: usize,
) -> Result<Evolution<S>> {
    spec.validate()?;
    let h = CompiledHamiltonian::new(spec)?;
    propagate_compiled(initial, spec, &h, t0, t1, cfg, samples)
}

fn propagate_compiled<S: StateVector>(
    initial: &S,
    spec: &HamiltonianSpec,
    h: &CompiledHamiltonian,
    t0: f64,
    t1: f64,
    cfg: &StepperConfig,
    samples: usize,
) -> Result<Evolution<S>> {
    cfg.check(h)?;
    if !(t1 >= t0) {
        return Err(Error::NegativeTime(t1 - t0));
    }
    let samples = samples.max(1);
    let mut psi = initial.to_flat();
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: h.dim(),
        });
    }
    let norm0 = psi.norm();
    let span = t1 - t0;
    let per_sample = ((span / cfg.dt / samples as f64).ceil() as usize).max(1);
    let steps = if span == 0.0 { 0 } else { per_sample * samples };
    let dt = if steps == 0 { 0.0 } else { span / steps as f64 };
    let mut snapshots = Snapshots {
        times: vec![t0],
        states: vec![psi.clone()],
    };
    let mut work = Workspace::new(psi.len());
    let mut max_drift: f64 = 0.0;
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        match cfg.method {
            StepMethod::FixedRk4 => rk4_step(h, t, dt, &mut psi, &mut work),
            StepMethod::MidpointExponential => midpoint_step(h, t, dt, &mut psi, &mut work),
        }
        let done = k + 1;
        let needs_norm = done % per_sample == 0
            || (cfg.renormalize_every > 0 && done % cfg.renormalize_every == 0)
            || done == steps;
        if needs_norm {
            let n = psi.norm();
            let drift = (n - norm0).abs();
            max_drift = max_drift.max(drift);
            if drift > MAX_DRIFT || !n.is_finite() {
                return Err(Error::StepperFailure {
                    t: t0 + done as f64 * dt,
                    drift,
                });
            }
            if cfg.renormalize_every > 0 && done % cfg.renormalize_every == 0 {
                psi.scale_mut_c(C64::new(norm0 / n, 0.0));
            }
        }
        if done % per_sample == 0 {
            let t_snap = if done == steps { t1 } else { t0 + done as f64 * dt };
            snapshots.times.push(t_snap);
            snapshots.states.push(psi.clone());
        }
    }
    if steps == 0 {
        snapshots.times.push(t1);
        snapshots.states.push(psi.clone());
    }
    Ok(Evolution {
        state: S::from_flat(psi, spec)?,
        snapshots,
        max_norm_drift: max_drift,
        steps,
    })
}
