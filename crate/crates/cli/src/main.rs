use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geophase_cli::config::{BranchArg, ConfigError, MethodArg, WhichArg};
use geophase_cli::{run, Experiment, Overrides, Provenance, RunConfig, RunMode};

#[derive(Parser)]
#[command(name = "geophase", version, about = "Geometric phases of a driven dispersive cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega0: Option<f64>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<RunMode>,
    /// Output CSV; a provenance sidecar `<out>.meta.json` is written next to it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest accepted |analytic - numeric| in `both` mode
    #[arg(long, global = true, allow_negative_numbers = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Total, dynamic and geometric phases of both branches
    Phases {
        #[arg(long, allow_negative_numbers = true)]
        t_final: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Normalized phase-space loop (chi/kappa) e^{i nu t} alpha(t)
    Trajectory(PathArgs),
    /// Rotating-frame amplitude and beta on the invariant hyperboloid
    Hyperboloid(PathArgs),
    /// Ramsey fringe over a uniform kappa grid; the point nearest chi/sqrt2 is placed on it
    Fringe {
        #[arg(long, allow_negative_numbers = true)]
        kappa_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Ramsey signal with mistimed cavity entry
    Jitter {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        delta_t: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        which: Option<WhichArg>,
    },
    /// Conditional cat states after a half cycle
    Cat,
    /// Dispersive approximation against the full Rabi model
    Validate {
        #[arg(long, allow_negative_numbers = true)]
        g_rabi: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Args)]
struct PathArgs {
    #[arg(long, value_enum)]
    branch: Option<BranchArg>,
    #[arg(long, allow_negative_numbers = true)]
    cycles: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

fn flags(cli: &Cli) -> (Experiment, Overrides) {
    let c = &cli.common;
    let mut o = Overrides {
        chi: c.chi,
        nu: c.nu,
        kappa: c.kappa,
        omega0: c.omega0,
        dim: c.dim,
        dt: c.dt,
        method: c.method,
        mode: c.mode,
        tolerance: c.tolerance,
        out: c.out.clone(),
        ..Default::default()
    };
    let exp = match &cli.command {
        Command::Phases { t_final, points } => {
            o.t_final = *t_final;
            o.points = *points;
            Experiment::Phases
        }
        Command::Trajectory(a) | Command::Hyperboloid(a) => {
            o.branch = a.branch;
            o.cycles = a.cycles;
            o.points = a.points;
            if matches!(cli.command, Command::Trajectory(_)) {
                Experiment::Trajectory
            } else {
                Experiment::Hyperboloid
            }
        }
        Command::Fringe { kappa_max, points } => {
            o.kappa_max = *kappa_max;
            o.points = *points;
            Experiment::Fringe
        }
        Command::Jitter { delta_t, which } => {
            o.delta_t = delta_t.clone();
            o.which = *which;
            Experiment::Jitter
        }
        Command::Cat => Experiment::Cat,
        Command::Validate { g_rabi, x_min, x_max, points } => {
            o.g_rabi = *g_rabi;
            o.x_min = *x_min;
            o.x_max = *x_max;
            o.points = *points;
            Experiment::Validate
        }
    };
    (exp, o)
}

fn fail(tag: &str, message: &str) -> ExitCode {
    let line = serde_json::json!({ "tag": tag, "message": message });
    eprintln!("{line}");
    ExitCode::from(1)
}

fn io_error(e: io::Error) -> ConfigError {
    ConfigError { tag: "io", message: e.to_string() }
}

fn emit(cfg: &RunConfig) -> Result<Option<f64>, ConfigError> {
    let table = run(cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io_error)?);
            table.write(&mut w).map_err(io_error)?;
            w.flush().map_err(io_error)?;
            let mut meta = path.clone().into_os_string();
            meta.push(".meta.json");
            let text = serde_json::to_string_pretty(&Provenance::new(cfg))
                .map_err(|e| ConfigError { tag: "io", message: e.to_string() })?;
            std::fs::write(meta, text + "\n").map_err(io_error)?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(&mut w).map_err(io_error)?;
            w.flush().map_err(io_error)?;
        }
    }
    Ok(table.worst_agreement())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, from_flags) = flags(&cli);
    let file = match &cli.common.config {
        Some(path) => match Overrides::from_file(path) {
            Ok(o) => o,
            Err(e) => return fail(e.tag, &e.message),
        },
        None => Overrides::default(),
    };
    let cfg = match from_flags.over(file).resolve(experiment) {
        Ok(c) => c,
        Err(e) => return fail(e.tag, &e.message),
    };
    match emit(&cfg) {
        Ok(Some(worst)) if !(worst <= cfg.tolerance) => fail(
            "tolerance",
            &format!("max |analytic - numeric| = {worst:e} exceeds tolerance {:e}", cfg.tolerance),
        ),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => fail(e.tag, &e.message),
    }
}
