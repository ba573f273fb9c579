//! Dispatch from a resolved configuration to the simulation library.

use std::f64::consts::PI;
use std::io::Write;

use geophase::analytic::{
    hyperboloid_trajectory, integrate_coefficients, phase_space_trajectory, InvariantCoeffs,
};
use geophase::experiments::{
    cat_generate, dispersive_validity_sweep, ramsey_fringe_scan, ramsey_jitter, CatOutcome,
    CatResult, Jitter, Mode, NumericSettings, RamseyResult,
};
use geophase::export::format_float;
use geophase::propagate::{extract_total_phase, propagate, HamiltonianSpec};
use geophase::{Branch, DriveProfile, FieldState, PhaseRecord, C64};

use crate::config::{Experiment, RunConfig, RunMode, WhichArg};

pub enum Cell {
    Num(f64),
    Text(&'static str),
}

/// Output table. Columns named `agreement*` hold analytic minus numeric.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn numeric(header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        let mut t = Table::new(header);
        t.rows = rows.into_iter().map(|r| r.into_iter().map(Cell::Num).collect()).collect();
        t
    }

    pub fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_float(*x),
                    Cell::Text(s) => s.to_string(),
                })
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Largest |agreement| over all agreement columns, if any exist.
    pub fn worst_agreement(&self) -> Option<f64> {
        let cols: Vec<usize> = (0..self.header.len())
            .filter(|&i| self.header[i].starts_with("agreement"))
            .collect();
        if cols.is_empty() {
            return None;
        }
        let mut worst = 0.0f64;
        for row in &self.rows {
            for &i in &cols {
                if let Cell::Num(x) = row[i] {
                    worst = if x.is_nan() { f64::INFINITY } else { worst.max(x.abs()) };
                }
            }
        }
        Some(worst)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn settings(cfg: &RunConfig) -> NumericSettings {
    NumericSettings {
        dim: cfg.dim,
        stepper: cfg.stepper(),
    }
}

fn wants(cfg: &RunConfig) -> (bool, bool) {
    match cfg.mode {
        RunMode::Analytic => (true, false),
        RunMode::Numeric => (false, true),
        RunMode::Both => (true, true),
    }
}

pub fn run(cfg: &RunConfig) -> geophase::Result<Table> {
    match cfg.experiment {
        Experiment::Phases => phases(cfg),
        Experiment::Trajectory => trajectory(cfg),
        Experiment::Hyperboloid => hyperboloid(cfg),
        Experiment::Fringe => fringe(cfg),
        Experiment::Jitter => jitter(cfg),
        Experiment::Cat => cat(cfg),
        Experiment::Validate => validate(cfg),
    }
}

/// Vacuum-start branch evolution sampled on `points` uniform times up to `t`.
fn evolve(cfg: &RunConfig, branch: Branch, t: f64) -> geophase::Result<geophase::propagate::Snapshots> {
    let p = cfg.params;
    let spec = HamiltonianSpec::branch(p, branch, DriveProfile::resonant(&p), cfg.dim)?;
    let start = FieldState::vacuum(cfg.dim)?;
    Ok(propagate(&start, &spec, 0.0, t, &cfg.stepper(), cfg.grid.points - 1)?.snapshots)
}

fn phases(cfg: &RunConfig) -> geophase::Result<Table> {
    let p = cfg.params;
    let times = linspace(0.0, cfg.grid.t_final, cfg.grid.points);
    let (analytic, numeric) = wants(cfg);
    let mut records = Vec::new();
    for branch in Branch::BOTH {
        let closed = PhaseRecord::closed_form(&p, branch, &times)?;
        let sim = if numeric {
            let snaps = evolve(cfg, branch, cfg.grid.t_final)?;
            Some(extract_total_phase(&snaps, &p, branch, &DriveProfile::resonant(&p))?)
        } else {
            None
        };
        records.push((closed, sim));
    }
    let mut header = vec![
        "t", "total_g", "dynamic_g", "geometric_g", "total_e", "dynamic_e", "geometric_e",
    ];
    if analytic && numeric {
        header.extend(["agreement_g", "agreement_e"]);
    }
    let rows = (0..times.len())
        .map(|i| {
            let mut row = vec![times[i]];
            for (closed, sim) in &records {
                let shown = sim.as_ref().unwrap_or(closed);
                row.extend([shown.total[i], shown.dynamic[i], shown.geometric[i]]);
            }
            if analytic && numeric {
                for (closed, sim) in &records {
                    row.push(closed.geometric[i] - sim.as_ref().map_or(0.0, |s| s.geometric[i]));
                }
            }
            row
        })
        .collect();
    Ok(Table::numeric(&header, rows))
}

fn trajectory(cfg: &RunConfig) -> geophase::Result<Table> {
    let p = cfg.params;
    let branch: Branch = cfg.grid.branch.into();
    let t_end = cfg.grid.cycles * 2.0 * PI / p.chi;
    let times = linspace(0.0, t_end, cfg.grid.points);
    let (analytic, numeric) = wants(cfg);
    let closed = phase_space_trajectory(&p, branch, &times);
    let sim: Option<Vec<C64>> = if numeric {
        if p.kappa == 0.0 {
            return Err(geophase::Error::Validation {
                constraint: "kappa > 0 for a normalized numeric trajectory",
                value: p.kappa,
            });
        }
        let snaps = evolve(cfg, branch, t_end)?;
        let scale = p.chi / p.kappa;
        let mut out = Vec::with_capacity(snaps.times.len());
        for (t, v) in snaps.times.iter().zip(&snaps.states) {
            let a = FieldState::from_amplitudes(v.clone())?.annihilation_expectation();
            out.push(a * C64::from_polar(scale, p.nu * t));
        }
        Some(out)
    } else {
        None
    };
    let mut header = vec!["t", "re", "im"];
    if analytic && numeric {
        header.push("agreement");
    }
    let rows = (0..times.len())
        .map(|i| {
            let z = sim.as_ref().map_or(closed[i], |s| s[i]);
            let mut row = vec![times[i], z.re, z.im];
            if analytic && numeric {
                row.push((closed[i] - z).norm());
            }
            row
        })
        .collect();
    Ok(Table::numeric(&header, rows))
}

fn hyperboloid(cfg: &RunConfig) -> geophase::Result<Table> {
    let p = cfg.params;
    let branch: Branch = cfg.grid.branch.into();
    let t_end = cfg.grid.cycles * 2.0 * PI / p.chi;
    let times = linspace(0.0, t_end, cfg.grid.points);
    let (analytic, numeric) = wants(cfg);
    let closed = hyperboloid_trajectory(&p, branch, &times)?;
    let sim: Option<Vec<(f64, f64, f64)>> = if numeric {
        let intervals = cfg.grid.points - 1;
        let per = ((t_end / intervals as f64 / cfg.dt).ceil() as usize).max(1);
        let path = integrate_coefficients(
            &p,
            branch,
            &DriveProfile::resonant(&p),
            InvariantCoeffs::vacuum(),
            t_end,
            per * intervals,
        )?;
        Some(
            path.iter()
                .step_by(per)
                .map(|(t, c)| {
                    let a = c.alpha * C64::from_polar(1.0, p.nu * t);
                    (a.re, a.im, c.beta)
                })
                .collect(),
        )
    } else {
        None
    };
    let mut header = vec!["t", "re", "im", "beta"];
    if analytic && numeric {
        header.extend(["agreement_alpha", "agreement_beta"]);
    }
    let rows = (0..times.len())
        .map(|i| {
            let (re, im, beta) = sim.as_ref().map_or(closed[i], |s| s[i]);
            let mut row = vec![times[i], re, im, beta];
            if analytic && numeric {
                let (cr, ci, cb) = closed[i];
                row.push(C64::new(cr - re, ci - im).norm());
                row.push(cb - beta);
            }
            row
        })
        .collect();
    Ok(Table::numeric(&header, rows))
}

/// Uniform kappa grid whose point nearest chi/sqrt(2) is moved onto it.
pub fn fringe_grid(chi: f64, kappa_max: f64, points: usize) -> Vec<f64> {
    let mut grid = linspace(0.0, kappa_max, points);
    let critical = chi * std::f64::consts::FRAC_1_SQRT_2;
    if critical <= kappa_max {
        let nearest = (0..points)
            .min_by(|&a, &b| (grid[a] - critical).abs().total_cmp(&(grid[b] - critical).abs()))
            .unwrap_or(0);
        grid[nearest] = critical;
    }
    grid
}

fn fringe(cfg: &RunConfig) -> geophase::Result<Table> {
    let grid = fringe_grid(cfg.params.chi, cfg.grid.kappa_max, cfg.grid.points);
    let (analytic, numeric) = wants(cfg);
    let mode = if numeric { Mode::Numeric } else { Mode::Analytic };
    let scan = ramsey_fringe_scan(&cfg.params, &grid, mode, &settings(cfg))?;
    let mut header = vec!["kappa", "w_sim", "w_closed", "p_e", "p_g"];
    if analytic && numeric {
        header.push("agreement");
    }
    let rows = scan
        .results
        .iter()
        .map(|r| {
            let mut row = vec![r.kappa, r.w_eg_simulated, r.w_eg_closed, r.p_e, r.p_g];
            if analytic && numeric {
                row.push(r.w_eg_closed - r.w_eg_simulated);
            }
            row
        })
        .collect();
    Ok(Table::numeric(&header, rows))
}

fn jitter(cfg: &RunConfig) -> geophase::Result<Table> {
    let (analytic, numeric) = wants(cfg);
    let mode = if numeric { Mode::Numeric } else { Mode::Analytic };
    let kinds: &[(Jitter, &'static str)] = match cfg.grid.which {
        WhichArg::Early => &[(Jitter::Early, "early")],
        WhichArg::Late => &[(Jitter::Late, "late")],
        WhichArg::Both => &[(Jitter::Early, "early"), (Jitter::Late, "late")],
    };
    let mut header = vec!["delta_t", "which", "w_sim", "w_closed", "correction"];
    if analytic && numeric {
        header.push("agreement");
    }
    let mut table = Table::new(&header);
    for &(which, label) in kinds {
        for &dt in &cfg.grid.delta_t {
            let r: RamseyResult = ramsey_jitter(&cfg.params, dt, which, mode, &settings(cfg))?;
            let mut row = vec![
                Cell::Num(dt),
                Cell::Text(label),
                Cell::Num(r.w_eg_simulated),
                Cell::Num(r.w_eg_closed),
                Cell::Num(geophase::experiments::jitter_correction(&cfg.params, dt, which)),
            ];
            if analytic && numeric {
                row.push(Cell::Num(r.w_eg_closed - r.w_eg_simulated));
            }
            table.rows.push(row);
        }
    }
    Ok(table)
}

fn cat(cfg: &RunConfig) -> geophase::Result<Table> {
    let (analytic, numeric) = wants(cfg);
    let closed = cat_generate(&cfg.params, Mode::Analytic, &settings(cfg))?;
    let sim = if numeric {
        Some(cat_generate(&cfg.params, Mode::Numeric, &settings(cfg))?)
    } else {
        None
    };
    let shown: &CatOutcome = sim.as_ref().unwrap_or(&closed);
    let mut header = vec!["detected", "probability", "fidelity", "relative_phase", "parity"];
    if analytic && numeric {
        header.push("agreement");
    }
    let mut table = Table::new(&header);
    let pick = |o: &CatOutcome, b: Branch| -> (f64, Option<CatResult>) {
        match b {
            Branch::Ground => (o.p_g, o.ground.clone()),
            Branch::Excited => (o.p_e, o.excited.clone()),
        }
    };
    for branch in Branch::BOTH {
        let (p, res) = pick(shown, branch);
        let (fidelity, phase, parity) = match &res {
            Some(r) => (r.fidelity_vs_reference, r.relative_phase, r.field_state.parity()),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        let mut row = vec![
            Cell::Text(branch.label()),
            Cell::Num(p),
            Cell::Num(fidelity),
            Cell::Num(phase),
            Cell::Num(parity),
        ];
        if analytic && numeric {
            row.push(Cell::Num(pick(&closed, branch).0 - p));
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn validate(cfg: &RunConfig) -> geophase::Result<Table> {
    let g = &cfg.grid;
    let grid: Vec<f64> = if g.points == 1 || g.x_min == g.x_max {
        vec![g.x_max]
    } else {
        let (lo, hi) = (g.x_min.ln(), g.x_max.ln());
        linspace(hi, lo, g.points).into_iter().map(f64::exp).collect()
    };
    let rows = dispersive_validity_sweep(&cfg.params, &grid, cfg.dim)?;
    let mut table = Table::new(&["g_over_delta_sq", "g", "delta", "phase_error", "leakage", "warning"]);
    for r in rows {
        table.rows.push(vec![
            Cell::Num(r.g_over_delta_sq),
            Cell::Num(r.g),
            Cell::Num(r.delta),
            Cell::Num(r.phase_error),
            Cell::Num(r.leakage),
            Cell::Text(if r.warning.is_some() { "1" } else { "0" }),
        ]);
    }
    Ok(table)
}
