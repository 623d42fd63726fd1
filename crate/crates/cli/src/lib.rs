//! The `isoatlas` command-line harness.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;

use config::{GalleryCase, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] isoatlas_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Malformed = 1,
    StageFailure = 2,
    Refutation = 3,
    Undetermined = 4,
}

#[derive(Debug, Parser)]
#[command(name = "isoatlas", version, about = "Metric midpoints, ball-isometry extension and patch-atlas certification")]
pub struct Cli {
    /// JSON file with default parameters; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (default: $ISOATLAS_OUT_DIR, else `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate the metric midpoint of two points by lens refinement.
    Midpoint(MidpointArgs),
    /// Extend an isometry of a ball to a global affine isometry.
    Extend(ExtendArgs),
    /// Certify or refute a patch atlas.
    Stitch(StitchArgs),
    /// Write demo instances: a wild map, a positive or an adversarial atlas.
    Gallery(GalleryArgs),
    /// Time the core operations on fixed workloads.
    Bench(BenchArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct MidpointArgs {
    /// Norm shorthand, e.g. `lp:inf:2`, `l1:3`, `wlp:2:1,4`, `hex:2`.
    #[arg(long)]
    pub norm: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<String>,
    /// Target diameter of the final cloud (default: d(x0, x1)/100).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sampling resolution (default: tol/2).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Write every refinement cloud as CSV.
    #[arg(long)]
    pub dump_clouds: bool,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub norm: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Map spec as inline JSON or `@file.json`.
    #[arg(long)]
    pub map: Option<String>,
    /// Sampling resolution (default: radius/50).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Isometry tolerance (default: 1e-9).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Offset of the interior witness along the first axis, as a fraction of the radius.
    #[arg(long)]
    pub witness_lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StitchArgs {
    /// Atlas file (JSON).
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Sampling resolution (default: smallest patch radius / 10).
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Require this fraction of the image region to be covered.
    #[arg(long)]
    pub min_coverage: Option<f64>,
    /// Force the seed patch.
    #[arg(long)]
    pub seed_patch: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    #[arg(long, value_enum)]
    pub case: Option<GalleryCase>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Norm of the generated atlas (default: `l2:2`).
    #[arg(long)]
    pub norm: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Repetitions per workload.
    #[arg(long)]
    pub reps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Malformed } else { Exit::Success };
            let _ = e.print();
            return code as i32;
        }
    };
    match dispatch(cli) {
        Ok(exit) => exit as i32,
        Err(e) => {
            eprintln!("error: {e}");
            Exit::Malformed as i32
        }
    }
}

fn dispatch(cli: Cli) -> Result<Exit, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = config::out_dir(cli.out, &cfg);
    match cli.command {
        Command::Midpoint(a) => commands::midpoint(a, cfg, &out),
        Command::Extend(a) => commands::extend(a, cfg, &out),
        Command::Stitch(a) => commands::stitch(a, cfg, &out),
        Command::Gallery(a) => commands::gallery(a, cfg, &out),
        Command::Bench(a) => commands::bench(a, cfg, &out),
        Command::Suite(a) => commands::suite(a, cfg, &out),
    }
}
