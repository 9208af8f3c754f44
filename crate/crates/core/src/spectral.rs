//! Spectrum folding and matching, density-of-states estimators, peak
//! detection, gap scans and the resonance smoothness probe.

use num_complex::Complex;
use rayon::prelude::*;

use crate::effective::{effective_spectrum, kicked_top_effective, kicked_top_effective_with};
use crate::error::{Error, Result};
use crate::floquet::{build_floquet, quasienergies, QuasiSpectrum, SpectrumSource, TopParams};
use crate::linalg::hermitian_eigenvalues;
use crate::scalar::{circular_distance, real, to_f64, wrap_angle, Real};
use crate::spin::{build_spin_operators, Spin};

/// Folds static energies into the first temporal Brillouin zone (−π, π].
pub fn fold_to_brillouin<T: Real>(values: &[T], period: T) -> Result<QuasiSpectrum<T>> {
    if !(period > T::zero() && period.is_finite()) {
        return Err(Error::OutOfRange {
            name: "period",
            value: to_f64(period),
            expected: "(0, inf)",
        });
    }
    Ok(QuasiSpectrum::new(
        values.iter().map(|&e| wrap_angle(e * period)),
        SpectrumSource::EffectiveFolded,
    ))
}

/// Exact quasienergies of the kicked top.
pub fn exact_spectrum<T: Real>(p: &TopParams<T>) -> Result<QuasiSpectrum<T>> {
    quasienergies(&build_floquet(p)?)
}

/// Effective eigenvalues folded into the Brillouin zone.
pub fn folded_effective_spectrum<T: Real>(p: &TopParams<T>) -> Result<QuasiSpectrum<T>> {
    let model = kicked_top_effective(p);
    fold_to_brillouin(&effective_spectrum(&model)?, p.period())
}

/// Optimal cyclic alignment of two sorted spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMatch<T> {
    /// `a[i]` is paired with `b[(i + offset) % n]`.
    pub offset: usize,
    pub pairing: Vec<(usize, usize)>,
    pub max_dist: T,
    pub mean_dist: T,
}

/// Pairs the levels of `a` and `b` by the cyclic shift of sorted order with
/// the smallest summed circular distance.
pub fn match_spectra<T: Real>(a: &QuasiSpectrum<T>, b: &QuasiSpectrum<T>) -> Result<SpectrumMatch<T>> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::LengthMismatch {
            left: n,
            right: b.len(),
        });
    }
    if n == 0 {
        return Err(Error::Empty("spectrum"));
    }
    let (xa, xb) = (a.angles(), b.angles());
    let dist = |offset: usize, i: usize| circular_distance(xa[i], xb[(i + offset) % n]);
    let mut best = (0usize, T::max_value().unwrap());
    for offset in 0..n {
        let total = (0..n).fold(T::zero(), |acc, i| acc + dist(offset, i));
        if total < best.1 {
            best = (offset, total);
        }
    }
    let offset = best.0;
    let max_dist = (0..n).fold(T::zero(), |acc, i| acc.max(dist(offset, i)));
    Ok(SpectrumMatch {
        offset,
        pairing: (0..n).map(|i| (i, (i + offset) % n)).collect(),
        max_dist,
        mean_dist: best.1 / real(n as f64),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DosEstimator {
    Gaussian,
    Fourier,
}

/// Level density on the quasienergy circle, per radian.
#[derive(Clone, Debug, PartialEq)]
pub struct DosCurve<T> {
    /// `−π + 2π(k+1)/N`, `k = 0..N`, so the last point is `π`.
    pub grid: Vec<T>,
    pub values: Vec<T>,
    pub sigma: T,
    pub estimator: DosEstimator,
    /// Fourier truncation; `None` for the Gaussian estimator.
    pub n_terms: Option<usize>,
}

impl<T: Real> DosCurve<T> {
    /// Periodic trapezoidal integral over the full circle.
    pub fn integral(&self) -> T {
        let h = T::two_pi() / real(self.grid.len() as f64);
        self.values.iter().fold(T::zero(), |acc, &v| acc + v) * h
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::min_value().unwrap(), |acc, &v| acc.max(v))
    }

    /// Sup-norm distance to another curve on the same grid.
    pub fn sup_distance(&self, other: &DosCurve<T>) -> Result<T> {
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs())))
    }
}

pub const MIN_DOS_GRID: usize = 256;

fn dos_grid<T: Real>(n: usize) -> Vec<T> {
    let step = T::two_pi() / real(n as f64);
    (0..n).map(|k| -T::pi() + step * real((k + 1) as f64)).collect()
}

/// Gaussian-broadened DOS with `σ = sigma_frac · 2π / n_levels`, using wrapped
/// normal densities so the curve is periodic and exactly normalised.
pub fn dos_gaussian<T: Real>(s: &QuasiSpectrum<T>, sigma_frac: T, grid_size: usize) -> Result<DosCurve<T>> {
    if !(sigma_frac > T::zero() && sigma_frac.is_finite()) {
        return Err(Error::OutOfRange {
            name: "sigma_frac",
            value: to_f64(sigma_frac),
            expected: "(0, inf)",
        });
    }
    if grid_size < MIN_DOS_GRID {
        return Err(Error::OutOfRange {
            name: "grid_size",
            value: grid_size as f64,
            expected: ">= 256",
        });
    }
    if s.is_empty() {
        return Err(Error::Empty("spectrum"));
    }
    let n_levels = real::<T>(s.len() as f64);
    let two_pi = T::two_pi();
    let sigma = sigma_frac * two_pi / n_levels;
    let images = (to_f64(sigma) * 10.0 / std::f64::consts::TAU).ceil() as i64 + 1;
    let norm = T::one() / (sigma * two_pi.sqrt() * n_levels);
    let inv_two_var = T::one() / (real::<T>(2.0) * sigma * sigma);
    let grid = dos_grid::<T>(grid_size);
    let values = grid
        .iter()
        .map(|&x| {
            let mut acc = T::zero();
            for &level in s.angles() {
                let d = wrap_angle(x - level);
                for k in -images..=images {
                    let u = d + two_pi * real(k as f64);
                    acc += (-u * u * inv_two_var).exp();
                }
            }
            acc * norm
        })
        .collect();
    Ok(DosCurve {
        grid,
        values,
        sigma,
        estimator: DosEstimator::Gaussian,
        n_terms: None,
    })
}

/// Truncated Fourier series of the Gaussian-damped DOS,
/// `1/2π + (1/πN) Re Σ_n ξ_n e^{inE} e^{−n²σ²/2}` with `ξ_n = Σ_r e^{−inE_r}`.
pub fn dos_fourier<T: Real>(s: &QuasiSpectrum<T>, n_terms: usize, sigma: T, grid_size: usize) -> Result<DosCurve<T>> {
    if !(sigma >= T::zero() && sigma.is_finite()) {
        return Err(Error::OutOfRange {
            name: "sigma",
            value: to_f64(sigma),
            expected: "[0, inf)",
        });
    }
    if grid_size < MIN_DOS_GRID {
        return Err(Error::OutOfRange {
            name: "grid_size",
            value: grid_size as f64,
            expected: ">= 256",
        });
    }
    if s.is_empty() {
        return Err(Error::Empty("spectrum"));
    }
    let half: T = real(0.5);
    // damped harmonic coefficients ξ_n e^{−n²σ²/2}
    let coefficients: Vec<Complex<T>> = (1..=n_terms)
        .map(|n| {
            let nf: T = real(n as f64);
            let xi = s
                .angles()
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, &e| {
                    let ph = -nf * e;
                    acc + Complex::new(ph.cos(), ph.sin())
                });
            xi * (-nf * nf * sigma * sigma * half).exp()
        })
        .collect();
    let base = T::one() / T::two_pi();
    let prefactor = T::one() / (T::pi() * real(s.len() as f64));
    let grid = dos_grid::<T>(grid_size);
    let values = grid
        .iter()
        .map(|&x| {
            // accumulate Re Σ c_n e^{inx} via the rotation recurrence
            let step = Complex::new(x.cos(), x.sin());
            let mut phase = step;
            let mut acc = T::zero();
            for (n, c) in coefficients.iter().enumerate() {
                if n % 64 == 63 {
                    // resynchronise to keep the recurrence error bounded
                    let a = x * real((n + 1) as f64);
                    phase = Complex::new(a.cos(), a.sin());
                }
                acc += (c * phase).re;
                phase *= step;
            }
            base + prefactor * acc
        })
        .collect();
    Ok(DosCurve {
        grid,
        values,
        sigma,
        estimator: DosEstimator::Fourier,
        n_terms: Some(n_terms),
    })
}

/// A local maximum of a DOS curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DosPeak<T> {
    pub location: T,
    pub height: T,
}

/// Circular local maxima higher than `prominence_ratio / 2π`, highest first.
pub fn find_dos_peaks<T: Real>(c: &DosCurve<T>, prominence_ratio: T) -> Result<Vec<DosPeak<T>>> {
    if !(prominence_ratio > T::one() && prominence_ratio.is_finite()) {
        return Err(Error::OutOfRange {
            name: "prominence_ratio",
            value: to_f64(prominence_ratio),
            expected: "(1, inf)",
        });
    }
    let n = c.values.len();
    let floor = prominence_ratio / T::two_pi();
    let v = &c.values;
    let mut peaks: Vec<DosPeak<T>> = (0..n)
        .filter(|&i| {
            let left = v[(i + n - 1) % n];
            let right = v[(i + 1) % n];
            v[i] > left && v[i] >= right && v[i] > floor
        })
        .map(|i| DosPeak {
            location: c.grid[i],
            height: v[i],
        })
        .collect();
    peaks.sort_by(|a, b| b.height.partial_cmp(&a.height).expect("finite DOS"));
    Ok(peaks)
}

/// Minimal adjacent gaps of the exact and folded effective spectra at one α.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapRow<T> {
    pub alpha: T,
    pub gap_exact: T,
    pub gap_effective: T,
}

fn gap_row<T: Real>(p: &TopParams<T>) -> Result<GapRow<T>> {
    Ok(GapRow {
        alpha: p.alpha,
        gap_exact: exact_spectrum(p)?.min_adjacent_gap(),
        gap_effective: effective_gap(p)?,
    })
}

fn effective_gap<T: Real>(p: &TopParams<T>) -> Result<T> {
    Ok(folded_effective_spectrum(p)?.min_adjacent_gap())
}

/// Evaluates both gaps at every α of a sorted grid (in parallel, output in grid order).
pub fn gap_scan<T: Real>(p_base: &TopParams<T>, alpha_grid: &[T]) -> Result<Vec<GapRow<T>>> {
    if alpha_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::OutOfRange {
            name: "alpha_grid",
            value: f64::NAN,
            expected: "sorted ascending",
        });
    }
    alpha_grid
        .par_iter()
        .map(|&alpha| gap_row(&TopParams::new(alpha, p_base.beta, p_base.spin)?))
        .collect()
}

/// Gap thresholds separating crossings from avoided crossings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapThresholds {
    /// Minima below this are crossings.
    pub crossing: f64,
    /// Minima above this are avoided crossings.
    pub avoided: f64,
}

impl Default for GapThresholds {
    fn default() -> Self {
        Self {
            crossing: 1e-8,
            avoided: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapClass {
    Crossing,
    Avoided,
    /// Between the two thresholds.
    Indeterminate,
}

impl GapThresholds {
    pub fn classify<T: Real>(&self, gap: T) -> GapClass {
        let g = to_f64(gap);
        if g < self.crossing {
            GapClass::Crossing
        } else if g > self.avoided {
            GapClass::Avoided
        } else {
            GapClass::Indeterminate
        }
    }
}

/// A refined local minimum of the effective gap along the scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapMinimum<T> {
    pub alpha: T,
    pub gap_effective: T,
    /// Exact gap at the same α.
    pub gap_exact: T,
    pub effective_class: GapClass,
    pub exact_class: GapClass,
}

const GOLDEN_ITERATIONS: usize = 80;

/// Locates the interior local minima of `gap_effective` in a scan, refines
/// each by golden-section search between its grid neighbours and classifies
/// the effective and exact gaps at the refined α.
pub fn refine_gap_minima<T: Real>(
    p_base: &TopParams<T>,
    rows: &[GapRow<T>],
    thresholds: GapThresholds,
) -> Result<Vec<GapMinimum<T>>> {
    let candidates: Vec<usize> = (1..rows.len().saturating_sub(1))
        .filter(|&i| {
            let g = rows[i].gap_effective;
            g < rows[i - 1].gap_effective && g <= rows[i + 1].gap_effective
        })
        .collect();
    candidates
        .par_iter()
        .map(|&i| {
            let (alpha, gap_effective) = golden_minimum(p_base, rows[i - 1].alpha, rows[i + 1].alpha, rows[i])?;
            let p = TopParams::new(alpha, p_base.beta, p_base.spin)?;
            let gap_exact = exact_spectrum(&p)?.min_adjacent_gap();
            Ok(GapMinimum {
                alpha,
                gap_effective,
                gap_exact,
                effective_class: thresholds.classify(gap_effective),
                exact_class: thresholds.classify(gap_exact),
            })
        })
        .collect()
}

fn golden_minimum<T: Real>(p_base: &TopParams<T>, lo: T, hi: T, seed: GapRow<T>) -> Result<(T, T)> {
    // Ĥ_eff is affine in α: build the two pieces once, not per evaluation
    let alg = build_spin_operators::<T>(p_base.spin);
    let at = |alpha: T| TopParams::new(alpha, p_base.beta, p_base.spin).map(|p| kicked_top_effective_with(&alg, &p).h_eff);
    let offset = at(T::zero())?;
    let slope = at(T::one())? - &offset;
    let gap = |alpha: T| -> Result<T> {
        let h = &slope * Complex::from(alpha) + &offset;
        Ok(fold_to_brillouin(&hermitian_eigenvalues(&h)?, p_base.period())?.min_adjacent_gap())
    };
    let inv_phi: T = real((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (gap(c)?, gap(d)?);
    let mut best = (seed.alpha, seed.gap_effective);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc < best.1 {
            best = (c, fc);
        }
        if fd < best.1 {
            best = (d, fd);
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = gap(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = gap(d)?;
        }
        if b - a <= T::default_epsilon() * (T::one() + a.abs()) {
            break;
        }
    }
    for (x, f) in [(c, fc), (d, fd)] {
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok(best)
}

/// Sorted effective eigenvalues and their α-derivatives at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow<T> {
    pub alpha: T,
    pub eigenvalues: Vec<T>,
    pub derivatives: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessProbe<T> {
    pub center: T,
    pub rows: Vec<ProbeRow<T>>,
}

impl<T: Real> SmoothnessProbe<T> {
    /// `max |dε/dα|` over the window.
    pub fn max_abs_derivative(&self) -> T {
        self.rows
            .iter()
            .flat_map(|r| r.derivatives.iter())
            .fold(T::zero(), |acc, d| acc.max(d.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.eigenvalues.iter().chain(&r.derivatives).all(|v| v.is_finite()))
    }
}

pub const MIN_PROBE_POINTS: usize = 11;

/// Resonance `α* = 4jlπ / (2m + 1)`.
pub fn resonance_alpha<T: Real>(spin: Spin, m: u32, l: u32) -> Result<T> {
    if l == 0 {
        return Err(Error::OutOfRange {
            name: "l",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let four_j_l: T = real(2.0 * f64::from(spin.twice()) * f64::from(l));
    Ok(four_j_l * T::pi() / real(2.0 * f64::from(m) + 1.0))
}

/// Effective spectrum on `n_points` uniform α values spanning
/// `[center − window, center + window]`, with finite-difference derivatives
/// (central inside, one-sided at the ends).
pub fn smoothness_probe<T: Real>(spin: Spin, beta: T, center: T, window: T, n_points: usize) -> Result<SmoothnessProbe<T>> {
    if n_points < MIN_PROBE_POINTS {
        return Err(Error::OutOfRange {
            name: "n_points",
            value: n_points as f64,
            expected: ">= 11",
        });
    }
    if !(window > T::zero() && window.is_finite()) {
        return Err(Error::OutOfRange {
            name: "window",
            value: to_f64(window),
            expected: "(0, inf)",
        });
    }
    let step = real::<T>(2.0) * window / real((n_points - 1) as f64);
    let alg = build_spin_operators::<T>(spin);
    let spectra: Vec<(T, Vec<T>)> = (0..n_points)
        .into_par_iter()
        .map(|k| {
            let alpha = center - window + step * real(k as f64);
            let p = TopParams::new(alpha, beta, spin)?;
            Ok((alpha, effective_spectrum(&kicked_top_effective_with(&alg, &p))?))
        })
        .collect::<Result<_>>()?;
    let two: T = real(2.0);
    let rows = (0..n_points)
        .map(|k| {
            let (lo, hi, span) = match k {
                0 => (0, 1, step),
                k if k == n_points - 1 => (k - 1, k, step),
                k => (k - 1, k + 1, two * step),
            };
            let derivatives = spectra[hi]
                .1
                .iter()
                .zip(&spectra[lo].1)
                .map(|(b, a)| (*b - *a) / span)
                .collect();
            ProbeRow {
                alpha: spectra[k].0,
                eigenvalues: spectra[k].1.clone(),
                derivatives,
            }
        })
        .collect();
    Ok(SmoothnessProbe { center, rows })
}

/// [`smoothness_probe`] centred on the resonance `α*` for `(m, l)`.
pub fn cbh_singularity_probe<T: Real>(
    spin: Spin,
    m: u32,
    l: u32,
    beta: T,
    window: T,
    n_points: usize,
) -> Result<SmoothnessProbe<T>> {
    let center = resonance_alpha(spin, m, l)?;
    smoothness_probe(spin, beta, center, window, n_points)
}
