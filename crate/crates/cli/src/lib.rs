//! Command-line pipelines over the `kicktop` library: α sweeps, DOS, gap
//! scans, reconstruction errors and classical phase portraits, written as
//! deterministic CSV tables with JSON sidecars.

pub mod config;
pub mod error;
pub mod output;
pub mod pipelines;

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

pub use config::{Command, RunConfig, Sweep};
pub use error::{CliError, Result};
pub use output::{Sidecar, Table};

/// Validates `config`, runs its pipeline on a pool of `config.jobs` threads
/// and writes every table into `config.out`. Returns the CSV paths in order.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs.unwrap_or(0)).build()?;
    let tables = pool.install(|| pipelines::run_pipeline(config))?;
    let wall = started.elapsed().as_secs_f64();
    fs::create_dir_all(&config.out).map_err(|e| output::io_err(&config.out, e))?;
    tables.iter().map(|t| output::write_table(&config.out, t, config, wall)).collect()
}
