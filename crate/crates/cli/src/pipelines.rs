//! The pipelines behind each subcommand. Each returns its tables in a fixed
//! order; rows follow the sweep order regardless of how work was scheduled.

use std::f64::consts::PI;

use kicktop::classical::{compare_orbits, hcl_energy, ic_grid, phase_portrait, CanonicalState};
use kicktop::effective::{classical_limit_check, reconstruction_distance};
use kicktop::floquet::TopParams;
use kicktop::spectral::{
    cbh_singularity_probe, dos_fourier, dos_gaussian, exact_spectrum, find_dos_peaks, folded_effective_spectrum,
    gap_scan, match_spectra, refine_gap_minima, resonance_alpha, smoothness_probe, DosCurve, GapClass,
};
use kicktop::{QuasiSpectrumF64, Spin, TopParamsF64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{fmt_float, Table};

/// Wraps a library error with the module, pipeline and parameters involved.
fn numeric<'a>(module: &'static str, cfg: &'a RunConfig, params: String) -> impl FnOnce(kicktop::Error) -> CliError + 'a {
    move |source| CliError::Numeric {
        module,
        pipeline: cfg.command.name(),
        params,
        source,
    }
}

fn top(cfg: &RunConfig, alpha: f64) -> Result<TopParamsF64> {
    TopParams::new(alpha, cfg.beta, cfg.spin()?).map_err(numeric("floquet", cfg, format!("alpha={alpha}, beta={}", cfg.beta)))
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |k| format!("{prefix}_{k}"))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<Vec<Table>> {
    match cfg.command {
        Command::SpectrumSweep => spectrum_sweep(cfg),
        Command::Dos => dos(cfg),
        Command::Reconstruct => reconstruct(cfg),
        Command::GapScan => gap_scan_pipeline(cfg),
        Command::SingularityProbe => singularity_probe(cfg),
        Command::PhasePortrait => phase_portrait_pipeline(cfg),
        Command::ClassicalLimit => classical_limit(cfg),
    }
}

fn spectrum_sweep(cfg: &RunConfig) -> Result<Vec<Table>> {
    let sweep = cfg.sweep_or_default()?;
    let dim = cfg.spin()?.dim();
    let rows: Vec<(f64, QuasiSpectrumF64, QuasiSpectrumF64, f64)> = sweep
        .points()
        .into_par_iter()
        .map(|alpha| {
            let p = top(cfg, alpha)?;
            let err = || numeric("spectral", cfg, format!("j={}, alpha={alpha}, beta={}", cfg.j, cfg.beta));
            let exact = exact_spectrum(&p).map_err(err())?;
            let eff = folded_effective_spectrum(&p).map_err(err())?;
            let m = match_spectra(&exact, &eff).map_err(err())?;
            Ok((alpha, exact, eff, m.mean_dist))
        })
        .collect::<Result<_>>()?;
    let header = std::iter::once("alpha".to_string())
        .chain(indexed("exact", dim))
        .chain(indexed("effective", dim))
        .collect();
    let mut t = Table::new("spectrum_sweep", header);
    for (alpha, exact, eff, _) in &rows {
        t.push_floats(std::iter::once(*alpha).chain(exact.angles().iter().copied()).chain(eff.angles().iter().copied()));
    }
    let dists: Vec<f64> = rows.iter().map(|r| r.3).collect();
    t.summary = json!({
        "mean_distance_per_alpha": dists,
        "median_mean_distance": median(dists.clone()),
        "max_mean_distance": dists.iter().copied().fold(0.0, f64::max),
    });
    Ok(vec![t])
}

fn dos_curve(cfg: &RunConfig, s: &QuasiSpectrumF64) -> kicktop::Result<DosCurve<f64>> {
    let g = dos_gaussian(s, cfg.sigma_frac, cfg.grid_size)?;
    match cfg.n_terms {
        Some(n) => dos_fourier(s, n, g.sigma, cfg.grid_size),
        None => Ok(g),
    }
}

fn peaks_json(c: &DosCurve<f64>, ratio: f64) -> kicktop::Result<Value> {
    let peaks = find_dos_peaks(c, ratio)?;
    Ok(peaks.iter().map(|p| json!({"location": p.location, "height": p.height})).collect())
}

fn dos(cfg: &RunConfig) -> Result<Vec<Table>> {
    let alpha = cfg.single_alpha(0.2)?;
    let p = top(cfg, alpha)?;
    let err = || numeric("spectral", cfg, format!("j={}, alpha={alpha}, beta={}, sigma_frac={}", cfg.j, cfg.beta, cfg.sigma_frac));
    let exact = dos_curve(cfg, &exact_spectrum(&p).map_err(err())?).map_err(err())?;
    let eff = dos_curve(cfg, &folded_effective_spectrum(&p).map_err(err())?).map_err(err())?;
    let mut t = Table::new("dos", vec!["angle".into(), "rho_exact".into(), "rho_effective".into()]);
    for ((x, a), b) in exact.grid.iter().zip(&exact.values).zip(&eff.values) {
        t.push_floats([*x, *a, *b]);
    }
    t.summary = json!({
        "estimator": format!("{:?}", exact.estimator),
        "sigma": exact.sigma,
        "n_terms": exact.n_terms,
        "integral_exact": exact.integral(),
        "integral_effective": eff.integral(),
        "sup_distance": exact.sup_distance(&eff).map_err(err())?,
        "peaks_exact": peaks_json(&exact, cfg.prominence).map_err(err())?,
        "peaks_effective": peaks_json(&eff, cfg.prominence).map_err(err())?,
    });
    Ok(vec![t])
}

fn reconstruct(cfg: &RunConfig) -> Result<Vec<Table>> {
    let alpha = cfg.single_alpha(1.0)?;
    let betas: Vec<f64> = (0..cfg.levels).map(|k| cfg.beta / f64::powi(2.0, k as i32)).collect();
    let spin = cfg.spin()?;
    let dists: Vec<f64> = betas
        .par_iter()
        .map(|&beta| {
            let err = numeric("effective", cfg, format!("j={}, alpha={alpha}, beta={beta}", cfg.j));
            TopParams::new(alpha, beta, spin).and_then(|p| reconstruction_distance(&p)).map_err(err)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("reconstruct", vec!["beta".into(), "distance".into()]);
    for (b, d) in betas.iter().zip(&dists) {
        t.push_floats([*b, *d]);
    }
    let ratios: Vec<f64> = dists.windows(2).map(|w| w[0] / w[1]).collect();
    t.summary = json!({ "alpha": alpha, "ratios": ratios });
    Ok(vec![t])
}

fn class_name(c: GapClass) -> &'static str {
    match c {
        GapClass::Crossing => "crossing",
        GapClass::Avoided => "avoided",
        GapClass::Indeterminate => "indeterminate",
    }
}

fn gap_scan_pipeline(cfg: &RunConfig) -> Result<Vec<Table>> {
    let sweep = cfg.sweep_or_default()?;
    let base = top(cfg, sweep.start)?;
    let err = || numeric("spectral", cfg, format!("j={}, beta={}, alpha=[{}, {}]x{}", cfg.j, cfg.beta, sweep.start, sweep.stop, sweep.count));
    let rows = gap_scan(&base, &sweep.points()).map_err(err())?;
    let thresholds = cfg.thresholds();
    let minima = refine_gap_minima(&base, &rows, thresholds).map_err(err())?;

    let mut scan = Table::new("gap_scan", vec!["alpha".into(), "gap_exact".into(), "gap_effective".into()]);
    for r in &rows {
        scan.push_floats([r.alpha, r.gap_exact, r.gap_effective]);
    }
    let mut refined = Table::new(
        "gap_minima",
        ["alpha", "gap_effective", "gap_exact", "effective_class", "exact_class"].map(String::from).to_vec(),
    );
    for m in &minima {
        refined.rows.push(vec![
            fmt_float(m.alpha),
            fmt_float(m.gap_effective),
            fmt_float(m.gap_exact),
            class_name(m.effective_class).into(),
            class_name(m.exact_class).into(),
        ]);
    }
    let crossings = minima.iter().filter(|m| m.effective_class == GapClass::Crossing);
    let open = crossings.clone().filter(|m| m.exact_class == GapClass::Avoided).count();
    let summary = json!({
        "minima": minima.len(),
        "effective_crossings": crossings.count(),
        "crossings_with_open_exact_gap": open,
    });
    scan.summary = summary.clone();
    refined.summary = summary;
    Ok(vec![scan, refined])
}

/// Center of the reference window used to judge smoothness near α*.
pub fn reference_center(resonance: f64, window: f64) -> f64 {
    resonance - 3.0 * window
}

fn singularity_probe(cfg: &RunConfig) -> Result<Vec<Table>> {
    let spin = cfg.spin()?;
    let err = || numeric("spectral", cfg, format!("j={}, m={}, l={}, beta={}, window={}", cfg.j, cfg.m, cfg.l, cfg.beta, cfg.window));
    let resonance: f64 = resonance_alpha(spin, cfg.m, cfg.l).map_err(err())?;
    let probe = cbh_singularity_probe(spin, cfg.m, cfg.l, cfg.beta, cfg.window, cfg.n_points).map_err(err())?;
    let reference =
        smoothness_probe(spin, cfg.beta, reference_center(resonance, cfg.window), cfg.window, cfg.n_points).map_err(err())?;
    let dim = spin.dim();
    let header = std::iter::once("alpha".to_string())
        .chain(indexed("eps", dim))
        .chain(indexed("deps_dalpha", dim))
        .collect();
    let mut t = Table::new("singularity_probe", header);
    for r in &probe.rows {
        t.push_floats(std::iter::once(r.alpha).chain(r.eigenvalues.iter().copied()).chain(r.derivatives.iter().copied()));
    }
    let (near, far) = (probe.max_abs_derivative(), reference.max_abs_derivative());
    t.summary = json!({
        "resonance_alpha": resonance,
        "reference_center": reference_center(resonance, cfg.window),
        "max_abs_derivative": near,
        "reference_max_abs_derivative": far,
        "ratio": near / far,
        "all_finite": probe.all_finite(),
    });
    Ok(vec![t])
}

fn orbit_table(stem: String, alpha: f64, orbits: &[Vec<CanonicalState<f64>>]) -> Table {
    let mut t = Table::new(stem, ["alpha", "ic", "kick", "z", "psi"].map(String::from).to_vec());
    for (ic, orbit) in orbits.iter().enumerate() {
        for (k, s) in orbit.iter().enumerate() {
            t.rows.push(vec![fmt_float(alpha), ic.to_string(), (k + 1).to_string(), fmt_float(s.z), fmt_float(s.psi)]);
        }
    }
    t
}

fn phase_portrait_pipeline(cfg: &RunConfig) -> Result<Vec<Table>> {
    let (nz, npsi) = cfg.ic_dims()?;
    let alphas = cfg.alphas_or(&[0.2, 1.0, 6.0]);
    let ics = ic_grid::<f64>(nz, npsi).map_err(numeric("classical", cfg, format!("ic_grid={}", cfg.ic_grid)))?;
    let mut tables = Vec::new();
    for (idx, &alpha) in alphas.iter().enumerate() {
        let err = || numeric("classical", cfg, format!("alpha={alpha}, beta={}, n_kicks={}, dt={}", cfg.beta, cfg.n_kicks, cfg.dt));
        let pp = phase_portrait(alpha, cfg.beta, &ics, cfg.n_kicks, cfg.dt).map_err(err())?;
        let cmps = pp
            .map_orbits
            .par_iter()
            .zip(&pp.flow_orbits)
            .map(|(m, f)| compare_orbits(m, f, alpha, cfg.beta))
            .collect::<kicktop::Result<Vec<_>>>()
            .map_err(err())?;
        let mut cmp = Table::new(
            format!("phase_portrait_{idx}_compare"),
            ["alpha", "ic", "z0", "psi0", "hausdorff", "hcl_var_map", "hcl_var_flow"].map(String::from).to_vec(),
        );
        for (ic, (s0, c)) in pp.initial.iter().zip(&cmps).enumerate() {
            cmp.rows.push(
                [fmt_float(alpha), ic.to_string()]
                    .into_iter()
                    .chain([s0.z, s0.psi, c.hausdorff, c.hcl_var_a, c.hcl_var_b].map(fmt_float))
                    .collect(),
            );
        }
        let summary = json!({
            "alpha": alpha,
            "max_hausdorff": cmps.iter().map(|c| c.hausdorff).fold(0.0, f64::max),
            "max_variance_ratio": cmps.iter().map(|c| c.hcl_var_a / c.hcl_var_b.max(f64::MIN_POSITIVE)).fold(0.0, f64::max),
        });
        let mut map = orbit_table(format!("phase_portrait_{idx}_map"), alpha, &pp.map_orbits);
        let mut flow = orbit_table(format!("phase_portrait_{idx}_flow"), alpha, &pp.flow_orbits);
        map.summary = summary.clone();
        flow.summary = summary.clone();
        cmp.summary = summary;
        tables.extend([map, flow, cmp]);
    }
    Ok(tables)
}

fn classical_limit(cfg: &RunConfig) -> Result<Vec<Table>> {
    let alpha = cfg.single_alpha(1.0)?;
    let spins: Vec<Spin> = cfg.spins.iter().map(|&j| Spin::new(j)).collect::<kicktop::Result<_>>().map_err(|e| CliError::Usage(e.to_string()))?;
    let err = numeric("effective", cfg, format!("alpha={alpha}, beta={}, theta={}, psi={}", cfg.beta, cfg.theta, cfg.psi));
    let values = classical_limit_check(alpha, cfg.beta, cfg.theta, cfg.psi, &spins).map_err(err)?;
    let z = cfg.theta.cos();
    let canonical = CanonicalState::new(z, cfg.psi.rem_euclid(2.0 * PI)).map_err(numeric("classical", cfg, format!("theta={}", cfg.theta)))?;
    let hcl = hcl_energy(&canonical, alpha, cfg.beta);
    let mut t = Table::new("classical_limit", ["j", "energy_per_j", "hcl", "deviation"].map(String::from).to_vec());
    let devs: Vec<f64> = values.iter().map(|v| (v - hcl).abs()).collect();
    for ((j, v), d) in cfg.spins.iter().zip(&values).zip(&devs) {
        t.push_floats([*j, *v, hcl, *d]);
    }
    let ratios: Vec<f64> = devs.windows(2).map(|w| w[1] / w[0]).collect();
    t.summary = json!({ "alpha": alpha, "hcl": hcl, "deviation_ratios": ratios });
    Ok(vec![t])
}
