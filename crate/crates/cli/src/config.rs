//! Run configuration: defaults, JSON config files and flag overrides.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use geophase::propagate::{StepMethod, StepperConfig};
use geophase::{Branch, SystemParams};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Phases,
    Trajectory,
    Hyperboloid,
    Fringe,
    Jitter,
    Cat,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Analytic,
    Numeric,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    #[value(alias = "ground")]
    #[serde(alias = "ground")]
    G,
    #[value(alias = "excited")]
    #[serde(alias = "excited")]
    E,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::G => Branch::Ground,
            BranchArg::E => Branch::Excited,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WhichArg {
    Early,
    Late,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Rk4,
    Midpoint,
}

impl From<MethodArg> for StepMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rk4 => StepMethod::FixedRk4,
            MethodArg::Midpoint => StepMethod::MidpointExponential,
        }
    }
}

/// Experiment-specific grid settings. Unused fields keep their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t_final: f64,
    pub points: usize,
    pub branch: BranchArg,
    pub cycles: f64,
    pub kappa_max: f64,
    pub delta_t: Vec<f64>,
    pub which: WhichArg,
    pub x_min: f64,
    pub x_max: f64,
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: SystemParams,
    pub mode: RunMode,
    pub dim: usize,
    pub dt: f64,
    pub method: MethodArg,
    pub tolerance: f64,
    pub grid: Grid,
    pub out: Option<PathBuf>,
}

/// Keys accepted in a JSON config file. Every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub chi: Option<f64>,
    pub nu: Option<f64>,
    pub kappa: Option<f64>,
    pub omega0: Option<f64>,
    pub g_rabi: Option<f64>,
    pub dim: Option<usize>,
    pub dt: Option<f64>,
    pub method: Option<MethodArg>,
    pub mode: Option<RunMode>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub t_final: Option<f64>,
    pub points: Option<usize>,
    pub branch: Option<BranchArg>,
    pub cycles: Option<f64>,
    pub kappa_max: Option<f64>,
    pub delta_t: Option<Vec<f64>>,
    pub which: Option<WhichArg>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
}

#[derive(Debug)]
pub struct ConfigError {
    pub tag: &'static str,
    pub message: String,
}

impl ConfigError {
    fn new(tag: &'static str, message: impl Into<String>) -> Self {
        ConfigError { tag, message: message.into() }
    }
}

impl From<geophase::Error> for ConfigError {
    fn from(e: geophase::Error) -> Self {
        ConfigError::new(e.tag(), e.to_string())
    }
}

impl Overrides {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("io", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            chi, nu, kappa, omega0, g_rabi, dim, dt, method, mode, tolerance, out, t_final,
            points, branch, cycles, kappa_max, delta_t, which, x_min, x_max
        )
    }

    pub fn resolve(self, experiment: Experiment) -> Result<RunConfig, ConfigError> {
        let defaults = SystemParams::default();
        let params = SystemParams {
            chi: self.chi.unwrap_or(1.0),
            nu: self.nu.unwrap_or(defaults.nu),
            kappa: self.kappa.unwrap_or(FRAC_1_SQRT_2),
            omega0: self.omega0.unwrap_or(defaults.omega0),
            g_rabi: self.g_rabi.unwrap_or(0.0),
            delta_t_jitter: 0.0,
        };
        params.validate()?;
        let default_points = match experiment {
            Experiment::Fringe => 51,
            Experiment::Validate => 9,
            Experiment::Phases => 257,
            _ => 513,
        };
        let grid = Grid {
            t_final: self.t_final.unwrap_or(2.0 * std::f64::consts::PI / params.chi),
            points: self.points.unwrap_or(default_points),
            branch: self.branch.unwrap_or(BranchArg::G),
            cycles: self.cycles.unwrap_or(1.0),
            kappa_max: self.kappa_max.unwrap_or(params.chi),
            delta_t: self.delta_t.unwrap_or_else(|| vec![0.008, 0.016, 0.032]),
            which: self.which.unwrap_or(WhichArg::Both),
            x_min: self.x_min.unwrap_or(1e-4),
            x_max: self.x_max.unwrap_or(1e-2),
        };
        let cfg = RunConfig {
            experiment,
            params,
            mode: self.mode.unwrap_or(RunMode::Analytic),
            dim: self.dim.unwrap_or(32),
            dt: self.dt.unwrap_or(1e-4),
            method: self.method.unwrap_or(MethodArg::Rk4),
            tolerance: self.tolerance.unwrap_or(1e-5),
            grid,
            out: self.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require(ok: bool, constraint: &str, value: f64) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(
            "validation",
            format!("validation failed: {constraint} (got {value})"),
        ))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate()?;
        let g = &self.grid;
        require(self.dim >= 2, "dim >= 2", self.dim as f64)?;
        require(self.dt > 0.0, "dt > 0", self.dt)?;
        require(self.tolerance > 0.0, "tolerance > 0", self.tolerance)?;
        require(g.t_final >= 0.0, "t_final >= 0", g.t_final)?;
        require(g.points >= 2, "points >= 2", g.points as f64)?;
        require(g.cycles >= 0.0, "cycles >= 0", g.cycles)?;
        require(g.kappa_max >= 0.0, "kappa_max >= 0", g.kappa_max)?;
        require(g.x_min > 0.0, "x_min > 0", g.x_min)?;
        require(g.x_max >= g.x_min, "x_max >= x_min", g.x_max)?;
        if let Some(bad) = g.delta_t.iter().find(|d| !(**d >= 0.0)) {
            require(false, "delta_t >= 0", *bad)?;
        }
        Ok(())
    }

    pub fn stepper(&self) -> StepperConfig {
        StepperConfig {
            method: self.method.into(),
            dt: self.dt,
            renormalize_every: 0,
        }
    }
}

/// Provenance written next to every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub program: String,
    pub version: String,
    pub config: RunConfig,
}

impl Provenance {
    pub fn new(config: &RunConfig) -> Self {
        Provenance {
            program: "geophase".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
        }
    }
}
