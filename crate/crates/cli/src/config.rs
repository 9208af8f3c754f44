//! Run configuration: parsed from flags, validated, and echoed into every
//! JSON sidecar so a run can be replayed from its outputs.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use kicktop::spectral::{GapThresholds, MIN_DOS_GRID, MIN_PROBE_POINTS};
use kicktop::Spin;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact vs folded effective quasienergies along an α sweep.
    SpectrumSweep,
    /// Density of states of both spectra at one α.
    Dos,
    /// Floquet reconstruction error for a halving sequence of β.
    Reconstruct,
    /// Minimal level gaps along an α sweep, with refined crossings.
    GapScan,
    /// Effective-spectrum smoothness around a CBH resonance.
    SingularityProbe,
    /// Map and flow orbits for a grid of initial conditions.
    PhasePortrait,
    /// Coherent-state energy of h_eff/j against H_cl as j grows.
    ClassicalLimit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SpectrumSweep => "spectrum-sweep",
            Command::Dos => "dos",
            Command::Reconstruct => "reconstruct",
            Command::GapScan => "gap-scan",
            Command::SingularityProbe => "singularity-probe",
            Command::PhasePortrait => "phase-portrait",
            Command::ClassicalLimit => "classical-limit",
        }
    }
}

/// Inclusive, evenly spaced α grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + step * k as f64).collect()
    }
}

const DEFAULT_SWEEP: Sweep = Sweep {
    start: 0.0,
    stop: 10.0,
    count: 201,
};

#[derive(Clone, Debug, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "kicktop", version, allow_negative_numbers = true, about = "Quantum kicked top: Floquet spectra, effective Hamiltonian and classical limit")]
pub struct RunConfig {
    /// Pipeline to run.
    #[arg(value_enum)]
    pub command: Command,

    /// Spin quantum number (positive half-integer).
    #[arg(long, default_value_t = 40.0)]
    pub j: f64,

    /// Torsion strength; comma-separated list for phase-portrait.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,

    /// Kick strength.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,

    #[arg(long)]
    pub alpha_start: Option<f64>,
    #[arg(long)]
    pub alpha_stop: Option<f64>,
    #[arg(long)]
    pub alpha_count: Option<usize>,

    /// DOS width as a fraction of the mean level spacing 2π/(2j+1).
    #[arg(long, default_value_t = 0.1)]
    pub sigma_frac: f64,

    /// Use the Fourier DOS estimator with this many terms (Gaussian otherwise).
    #[arg(long)]
    pub n_terms: Option<usize>,

    /// RK4 step for the classical flow.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,

    /// Number of map kicks / flow periods.
    #[arg(long, default_value_t = 2000)]
    pub n_kicks: usize,

    /// Initial-condition grid as NZxNPSI.
    #[arg(long, default_value = "5x4")]
    pub ic_grid: String,

    /// DOS grid points on the quasienergy circle.
    #[arg(long, default_value_t = 2048)]
    pub grid_size: usize,

    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads (default: machine parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Peak prominence ratio (peak height over the curve mean).
    #[arg(long, default_value_t = 1.5)]
    pub prominence: f64,

    /// CBH resonance integers: α* = 4jlπ/(2m+1).
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    #[arg(long, default_value_t = 1)]
    pub l: u32,

    /// Half-width of the singularity-probe window.
    #[arg(long, default_value_t = 0.5)]
    pub window: f64,

    /// Points in the singularity-probe window.
    #[arg(long, default_value_t = 101)]
    pub n_points: usize,

    /// Coherent-state angles for classical-limit.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub psi: f64,

    /// Spins for classical-limit.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 40.0, 80.0])]
    pub spins: Vec<f64>,

    /// Number of β halvings for reconstruct.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,

    /// Gap below which a refined minimum counts as a crossing.
    #[arg(long, default_value_t = 1e-8)]
    pub crossing_threshold: f64,

    /// Gap above which a refined minimum counts as avoided.
    #[arg(long, default_value_t = 1e-6)]
    pub avoided_threshold: f64,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    /// Default configuration for `command` (as if no flags were given).
    pub fn for_command(command: Command) -> Self {
        Self::parse_from(["kicktop", command.name()])
    }

    pub fn spin(&self) -> Result<Spin> {
        Spin::new(self.j).map_err(|e| usage(format!("--j: {e}")))
    }

    /// The α sweep, if any of the sweep flags were given.
    pub fn sweep(&self) -> Result<Option<Sweep>> {
        match (self.alpha_start, self.alpha_stop, self.alpha_count) {
            (None, None, None) => Ok(None),
            (Some(start), Some(stop), Some(count)) => Ok(Some(Sweep { start, stop, count })),
            _ => Err(usage("--alpha-start, --alpha-stop and --alpha-count must be given together")),
        }
    }

    /// Sweep for the sweeping pipelines, falling back to α ∈ [0, 10] with 201 points.
    pub fn sweep_or_default(&self) -> Result<Sweep> {
        Ok(self.sweep()?.unwrap_or(DEFAULT_SWEEP))
    }

    /// The single α of a one-point pipeline.
    pub fn single_alpha(&self, default: f64) -> Result<f64> {
        match self.alpha.as_slice() {
            [] => Ok(default),
            [a] => Ok(*a),
            _ => Err(usage(format!("{} takes a single --alpha", self.command.name()))),
        }
    }

    pub fn alphas_or(&self, default: &[f64]) -> Vec<f64> {
        if self.alpha.is_empty() {
            default.to_vec()
        } else {
            self.alpha.clone()
        }
    }

    pub fn ic_dims(&self) -> Result<(usize, usize)> {
        let bad = || usage(format!("--ic-grid must look like 5x4, got {:?}", self.ic_grid));
        let (a, b) = self.ic_grid.split_once('x').ok_or_else(bad)?;
        let nz: usize = a.trim().parse().map_err(|_| bad())?;
        let npsi: usize = b.trim().parse().map_err(|_| bad())?;
        if nz == 0 || npsi == 0 {
            return Err(bad());
        }
        Ok((nz, npsi))
    }

    pub fn thresholds(&self) -> GapThresholds {
        GapThresholds {
            crossing: self.crossing_threshold,
            avoided: self.avoided_threshold,
        }
    }

    /// Checks every knob; violations are usage errors.
    pub fn validate(&self) -> Result<()> {
        self.spin()?;
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(usage(format!("--beta must be non-negative and finite, got {}", self.beta)));
        }
        if let Some(a) = self.alpha.iter().find(|a| !a.is_finite()) {
            return Err(usage(format!("--alpha must be finite, got {a}")));
        }
        if let Some(s) = self.sweep()? {
            if s.count < 2 {
                return Err(usage(format!("--alpha-count must be at least 2, got {}", s.count)));
            }
            if !(s.start.is_finite() && s.stop.is_finite() && s.stop > s.start) {
                return Err(usage("--alpha-stop must exceed --alpha-start"));
            }
        }
        positive("sigma-frac", self.sigma_frac)?;
        positive("dt", self.dt)?;
        positive("window", self.window)?;
        positive("crossing-threshold", self.crossing_threshold)?;
        positive("avoided-threshold", self.avoided_threshold)?;
        if self.crossing_threshold >= self.avoided_threshold {
            return Err(usage("--crossing-threshold must be below --avoided-threshold"));
        }
        if !(self.prominence > 1.0 && self.prominence.is_finite()) {
            return Err(usage(format!("--prominence must exceed 1, got {}", self.prominence)));
        }
        if self.n_terms == Some(0) {
            return Err(usage("--n-terms must be positive"));
        }
        if self.n_kicks == 0 {
            return Err(usage("--n-kicks must be positive"));
        }
        if self.grid_size < MIN_DOS_GRID {
            return Err(usage(format!("--grid-size must be at least {MIN_DOS_GRID}")));
        }
        if self.n_points < MIN_PROBE_POINTS {
            return Err(usage(format!("--n-points must be at least {MIN_PROBE_POINTS}")));
        }
        if self.levels < 2 {
            return Err(usage("--levels must be at least 2"));
        }
        if self.jobs == Some(0) {
            return Err(usage("--jobs must be positive"));
        }
        if self.spins.is_empty() {
            return Err(usage("--spins must not be empty"));
        }
        for &j in &self.spins {
            Spin::new(j).map_err(|e| usage(format!("--spins: {e}")))?;
        }
        for &(name, v) in &[("theta", self.theta), ("psi", self.psi)] {
            if !v.is_finite() {
                return Err(usage(format!("--{name} must be finite")));
            }
        }
        self.ic_dims()?;
        match self.command {
            Command::Dos | Command::Reconstruct | Command::ClassicalLimit => {
                self.single_alpha(0.0)?;
            }
            _ => {}
        }
        Ok(())
    }
}
