//! Command-line front end: design shortcut ramps for a trapped
//! Tonks-Girardeau gas and verify them by propagating the mean-field and
//! orbital descriptions.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 solver non-convergence, 4 propagation monitor trip.

mod config;
mod output;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, RunConfig};
use runs::Context;
use tg_sta::Error;

#[derive(Parser)]
#[command(
    name = "tg-sta",
    version,
    about = "Shortcut-to-adiabaticity ramps for a 1D Tonks-Girardeau gas"
)]
struct Cli {
    /// TOML run configuration (see presets/).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV tables and metadata.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweeps (1 gives bit-identical reproducibility).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override the automatic time step.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Override the spatial grid as XMIN,XMAX,N.
    #[arg(
        long,
        global = true,
        value_name = "XMIN,XMAX,N",
        allow_hyphen_values = true
    )]
    grid: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state densities of the initial trap.
    Ground,
    /// Tabulate b(t) and omega^2(t) for the configured ramps.
    Ramps,
    /// Initial and target densities of all descriptions.
    Densities,
    /// Evolve both descriptions through each ramp at one duration.
    Evolve,
    /// Fidelity against ramp duration (harmonic trap).
    Fig2,
    /// Ansatz integral scalings and fitted slopes.
    Fig3,
    /// Fidelity against ramp duration (anharmonic trap).
    Fig4,
    /// Fidelity against particle number at fixed durations.
    Fig5,
    /// Self-convergence check: doubled grid, halved step.
    Converge,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ground => "ground",
            Command::Ramps => "ramps",
            Command::Densities => "densities",
            Command::Evolve => "evolve",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Fig5 => "fig5",
            Command::Converge => "converge",
        }
    }
}

fn parse_grid(spec: &str) -> Result<(f64, f64, usize), ConfigError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(ConfigError(format!(
            "--grid expects XMIN,XMAX,N, got \"{spec}\""
        )));
    }
    let x_min: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad grid xmin \"{}\"", parts[0])))?;
    let x_max: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad grid xmax \"{}\"", parts[1])))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad grid point count \"{}\"", parts[2])))?;
    Ok((x_min, x_max, n))
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| ConfigError("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(spec) = &cli.grid {
        let (x_min, x_max, n) = parse_grid(spec)?;
        cfg.x_min = x_min;
        cfg.x_max = x_max;
        cfg.n_points = n;
    }
    if let Some(dt) = cli.dt {
        cfg.dt = Some(dt);
    }
    if let Some(threads) = cli.threads {
        cfg.threads = Some(threads);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = load_config(cli).map_err(|e| Error::InvalidParam(e.0))?;
    if let Some(threads) = cfg.threads {
        if threads == 0 {
            return Err(Error::InvalidParam("threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
    }
    let ctx = Context::new(cfg, cli.out.clone())?;
    match cli.command {
        Command::Ground => ctx.run_ground(),
        Command::Ramps => ctx.run_ramps(),
        Command::Densities => ctx.run_densities(),
        Command::Evolve => ctx.run_evolve(),
        Command::Fig2 => ctx.run_duration_sweep("fig2"),
        Command::Fig4 => ctx.run_duration_sweep("fig4"),
        Command::Fig3 => ctx.run_fig3(),
        Command::Fig5 => ctx.run_fig5(),
        Command::Converge => ctx.run_converge(),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParam(_)
        | Error::GridSize(_)
        | Error::GridExtent { .. }
        | Error::GridMismatch
        | Error::SizeMismatch(..)
        | Error::ZeroDensity => 2,
        Error::NonConvergence { .. } | Error::NoBoundaryRoot { .. } => 3,
        Error::EdgeMass { .. } | Error::SpectralTail { .. } | Error::NonFinite => 4,
        Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {
            eprintln!(
                "{}: ok, outputs in {}",
                cli.command.name(),
                cli.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}: error: {err}", cli.command.name());
            ExitCode::from(exit_code_for(&err))
        }
    }
}
