//! Command-line front end: `sim <energy|state|eigen|sweep|validate>`.

pub mod config;
pub mod experiments;
pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use config::{ExperimentKind, Resolved};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTEGRATION: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "sim", version, about = "Dissipative one-way transfer through a lossy cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-qubit energy transfer: trajectory plus steady state.
    Energy(Common),
    /// Four-qubit state transfer of `alpha|up down>_13 + beta|down up>_13`.
    State(Common),
    /// Closed-form dressed states, selection rules and a numeric cross-check.
    Eigen(Common),
    /// Steady value and time-to-half over one parameter axis.
    Sweep(Common),
    /// Invariant and oracle checks; exits 2 on any failure.
    Validate(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML experiment file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    workers: Option<usize>,
    /// Print the fully resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Integration(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Integration(_) => EXIT_INTEGRATION,
            Self::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Integration(m) | Self::Validation(m) => m,
        }
    }
}

fn from_error(e: Error, resolved: &Resolved) -> Failure {
    match e {
        Error::Params(_) | Error::Layout(_) | Error::DegenerateAngle => Failure::Config(e.to_string()),
        other => Failure::Integration(format!("{other}\nconfig ({}):\n{}", resolved.hash(), resolved.echo())),
    }
}

fn io_failure(e: std::io::Error, path: &std::path::Path) -> Failure {
    Failure::Integration(format!("{}: {e}", path.display()))
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

fn execute(command: Command) -> Result<(), Failure> {
    let (kind, common) = match command {
        Command::Energy(c) => (ExperimentKind::EnergyTransfer, c),
        Command::State(c) => (ExperimentKind::StateTransfer, c),
        Command::Eigen(c) => (ExperimentKind::EigenReport, c),
        Command::Sweep(c) => (ExperimentKind::Sweep, c),
        Command::Validate(c) => (ExperimentKind::Validate, c),
    };
    let mut cfg = match &common.config {
        Some(path) => config::load(path).map_err(Failure::Config)?,
        None => config::ExperimentConfig::default(),
    };
    if let Some(out) = common.out {
        cfg.output.dir = Some(out);
    }
    let resolved = config::resolve(cfg, kind).map_err(Failure::Config)?;
    if common.print_config {
        print!("{}", resolved.to_toml());
        return Ok(());
    }
    let workers = match common.workers {
        Some(0) => return Err(Failure::Config("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };

    let title = kind.default_name();
    let r = &resolved;
    match kind {
        ExperimentKind::EnergyTransfer => {
            let out = experiments::run_energy_transfer(r).map_err(|e| from_error(e, r))?;
            let path = output::path_for(r, "");
            out.table.write(r, title, &path).map_err(|e| io_failure(e, &path))?;
            println!(
                "steady pe2 = {} (t = {}, residual = {}, converged = {})",
                output::num(out.steady_pe2),
                output::num(out.steady.t_reached),
                output::num(out.steady.residual),
                out.steady.converged
            );
            println!("wrote {}", path.display());
        }
        ExperimentKind::StateTransfer => {
            let out = experiments::run_state_transfer(r).map_err(|e| from_error(e, r))?;
            let path = output::path_for(r, "");
            out.table.write(r, title, &path).map_err(|e| io_failure(e, &path))?;
            println!(
                "steady fidelity = {} (phase-optimized {}, t = {}, residual = {}, converged = {})",
                output::num(out.steady_fidelity),
                output::num(out.steady_fidelity_phase_optimized),
                output::num(out.steady.t_reached),
                output::num(out.steady.residual),
                out.steady.converged
            );
            println!("wrote {}", path.display());
        }
        ExperimentKind::EigenReport => {
            let table = experiments::run_eigen_report(r).map_err(|e| from_error(e, r))?;
            let path = output::path_for(r, "");
            table.write(r, title, &path).map_err(|e| io_failure(e, &path))?;
            for (k, v) in &table.summary {
                println!("{k} = {v}");
            }
            println!("wrote {}", path.display());
        }
        ExperimentKind::Sweep => {
            let out = experiments::run_sweep(r, workers).map_err(|e| from_error(e, r))?;
            let path = output::path_for(r, "_summary");
            out.table.write(r, title, &path).map_err(|e| io_failure(e, &path))?;
            for row in &out.table.rows {
                println!("{}", row.join(","));
            }
            println!("wrote {}", path.display());
        }
        ExperimentKind::Validate => {
            let checks = validate::run_validate(r);
            let table = validate::table(&checks);
            let path = output::path_for(r, "");
            table.write(r, title, &path).map_err(|e| io_failure(e, &path))?;
            for ch in &checks {
                let tag = if ch.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} value={} tol={} {}", ch.name, output::num(ch.value), output::num(ch.tolerance), ch.detail);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Validation(format!("{failed} of {} checks failed", checks.len())));
            }
            println!("all {} checks passed", checks.len());
        }
    }
    Ok(())
}
