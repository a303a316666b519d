//! `oatbell` command-line front end.
//!
//! Exit status: 0 success, 2 usage error, 3 numerical failure, 1 I/O.

mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use commands::{LatticeRun, TimeAxis};
use config::{require, ConfigFile, Format, Grid, GridArgs, LatticeArgs};
use output::emit;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

#[derive(Parser)]
#[command(name = "oatbell", version, about = "One-axis twisting Bell correlations and lattice cross-checks")]
struct Cli {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and approximate OAT correlator over a tau grid.
    Oat {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Two-component Bose-Hubbard trajectory.
    Lattice {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_stop: Option<f64>,
        #[arg(long)]
        t_points: Option<usize>,
        /// Write `<out>.checkpoint.json` every this many rows.
        #[arg(long)]
        checkpoint_every: Option<usize>,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Bell and entanglement depth certified by a correlator value.
    Classify {
        #[arg(long)]
        e: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Lattice versus OAT on tau in [0, pi/2].
    Compare {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        tau_points: Option<usize>,
    },
    /// Brute-force local hidden variable maximum.
    Lhv {
        #[arg(long)]
        n: Option<usize>,
    },
}

fn checkpoint_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".checkpoint.json");
    PathBuf::from(name)
}

fn run(cli: Cli) -> Result<()> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let out = cli.out.or(file.out.clone());
    let threads = cli.threads.or(file.threads).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| UsageError(format!("thread pool: {e}")))?;
    let format = cli.format.or(file.format);
    let n_or = |n: Option<usize>| require(n.or(file.n), "n");

    match cli.command {
        Command::Oat { n, grid } => {
            let n = n_or(n)?;
            let grid = Grid::resolve(
                grid.tau_start.or(file.tau_start),
                grid.tau_stop.or(file.tau_stop),
                grid.tau_points.or(file.tau_points),
                grid.tau_list.or(file.tau_list.clone()),
                "tau",
            )?;
            if n % 2 != 0 || n < 2 {
                return Err(UsageError(format!("oat needs an even N >= 2, got {n}")).into());
            }
            let (table, plot) = commands::oat(n, &grid)?;
            emit(&table, out.as_deref(), format.unwrap_or(Format::Csv), Some(&plot))
        }
        Command::Lattice {
            n,
            lattice,
            grid,
            t_start,
            t_stop,
            t_points,
            checkpoint_every,
            resume,
        } => {
            let n = n_or(n)?;
            let setup = lattice.resolve(n, &file)?;
            let raw = (t_start.or(file.t_start), t_stop.or(file.t_stop), t_points.or(file.t_points));
            let axis = if raw.0.is_some() || raw.1.is_some() || raw.2.is_some() {
                TimeAxis::Time(Grid::resolve(raw.0, raw.1, raw.2, None, "t")?)
            } else {
                TimeAxis::Tau(Grid::resolve(
                    grid.tau_start.or(file.tau_start),
                    grid.tau_stop.or(file.tau_stop),
                    grid.tau_points.or(file.tau_points),
                    grid.tau_list.or(file.tau_list.clone()),
                    "tau",
                )?)
            };
            let checkpoint_every = checkpoint_every.or(file.checkpoint_every);
            if checkpoint_every.is_some() && out.is_none() {
                return Err(UsageError("--checkpoint-every needs --out".into()).into());
            }
            let (table, plot) = commands::lattice(LatticeRun {
                params: setup.params,
                krylov: setup.krylov,
                max_dt: setup.max_dt,
                axis,
                checkpoint_every,
                checkpoint_path: out.as_deref().map(checkpoint_path),
                resume: resume.as_deref(),
            })?;
            emit(&table, out.as_deref(), format.unwrap_or(Format::Csv), Some(&plot))
        }
        Command::Classify { e, n } => {
            let n = n_or(n)?;
            let e = require(e.or(file.e), "e")?;
            let (table, report) = commands::classify(e, n)?;
            match format.unwrap_or(Format::Text) {
                Format::Text => {
                    let mut buf = Vec::new();
                    commands::write_classify_text(&mut buf, &report)?;
                    write_bytes(out.as_deref(), &buf)
                }
                f => emit(&table, out.as_deref(), f, None),
            }
        }
        Command::Compare { n, lattice, tau_points } => {
            let n = n_or(n)?;
            let setup = lattice.resolve(n, &file)?;
            let points = require(tau_points.or(file.tau_points), "tau-points")?;
            let (table, plot) = commands::compare(setup.params, setup.krylov, points)?;
            emit(&table, out.as_deref(), format.unwrap_or(Format::Csv), Some(&plot))
        }
        Command::Lhv { n } => {
            let n = n_or(n)?;
            let outcome = commands::lhv(n)?;
            match format.unwrap_or(Format::Text) {
                Format::Text => write_bytes(out.as_deref(), outcome.text.as_bytes())?,
                f => emit(&outcome.table, out.as_deref(), f, None)?,
            }
            if !outcome.matches_bound {
                return Err(NumericalFailure("brute-force maximum differs from 2^-N".into()).into());
            }
            Ok(())
        }
    }
}

fn write_bytes(out: Option<&std::path::Path>, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<NumericalFailure>().is_some() {
        return 3;
    }
    if let Some(e) = err.downcast_ref::<oatbell::Error>() {
        use oatbell::Error as E;
        return match e {
            E::InvalidParticleNumber { .. }
            | E::InvalidArgument(_)
            | E::CorrelatorOutOfRange(_)
            | E::OddRevivalOrder(_)
            | E::TooManyParties { .. }
            | E::DimensionCap { .. }
            | E::Checkpoint(_) => 2,
            E::Io(_) | E::Json(_) => 1,
            _ => 3,
        };
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
