use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Time-dependent linear amplification f(t).
#[derive(Clone, Debug, PartialEq)]
pub enum DriveProfile {
    /// f(t) = 0.
    Zero,
    /// f(t) = kappa e^{-i nu t}.
    Resonant { kappa: f64, nu: f64 },
    /// Linear interpolation of samples; zero outside the sampled window.
    Sampled(SampledDrive),
}

impl DriveProfile {
    /// Drive resonant with the bare field mode of `params`.
    pub fn resonant(params: &SystemParams) -> Self {
        DriveProfile::Resonant {
            kappa: params.kappa,
            nu: params.nu,
        }
    }

    pub fn eval(&self, t: f64) -> C64 {
        match self {
            DriveProfile::Zero => C64::new(0.0, 0.0),
            DriveProfile::Resonant { kappa, nu } => C64::from_polar(*kappa, -nu * t),
            DriveProfile::Sampled(s) => s.eval(t),
        }
    }

    /// Upper bound on |f(t)|.
    pub fn magnitude_bound(&self) -> f64 {
        match self {
            DriveProfile::Zero => 0.0,
            DriveProfile::Resonant { kappa, .. } => kappa.abs(),
            DriveProfile::Sampled(s) => s.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledDrive {
    times: Vec<f64>,
    values: Vec<C64>,
}

impl SampledDrive {
    /// `times` must be strictly increasing and match `values` in length.
    pub fn new(times: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                left: times.len(),
                right: values.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::InvalidDimension {
                dim: times.len(),
                reason: "a sampled drive needs at least two samples",
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneGrid);
        }
        Ok(SampledDrive { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> C64 {
        let n = self.times.len();
        if t < self.times[0] || t > self.times[n - 1] {
            return C64::new(0.0, 0.0);
        }
        let k = self.times.partition_point(|&x| x <= t);
        if k == n {
            return self.values[n - 1];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - w) + self.values[k] * w
    }
}
