//! Exact kicked-top Floquet operator, its quasienergies and the one-period
//! Heisenberg map.

use nalgebra::{ComplexField, Schur};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{im, real, to_f64, wrap_angle, Real};
use crate::spin::{build_spin_operators, hermitian_exp, Spin, SpinAlgebra};

/// Kicked-top parameters. Time units are fixed: period `T = 1`, `ω = 2π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopParams<T: Real> {
    /// Torsion strength α.
    pub alpha: T,
    /// Kick rotation angle β (radians).
    pub beta: T,
    pub spin: Spin,
}

impl<T: Real> TopParams<T> {
    pub fn new(alpha: T, beta: T, spin: Spin) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: to_f64(v),
                    expected: "a finite real",
                });
            }
        }
        Ok(Self { alpha, beta, spin })
    }

    pub fn period(&self) -> T {
        T::one()
    }

    pub fn omega(&self) -> T {
        T::two_pi() / self.period()
    }

    pub fn with_alpha(self, alpha: T) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_beta(self, beta: T) -> Self {
        Self { beta, ..self }
    }

    pub fn with_spin(self, spin: Spin) -> Self {
        Self { spin, ..self }
    }
}

/// Order in which the torsion and the kick act on a state within one period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum StepOrder {
    /// `F = exp(−iβJx) exp(−iαJz²/2j)`: torsion first, then the kick.
    #[default]
    TorsionFirst,
    /// `F = exp(−iαJz²/2j) exp(−iβJx)`: kick first, then the torsion. This is
    /// the ordering whose classical limit is [`crate::classical::kicked_top_map`].
    KickFirst,
}

/// Where a spectrum came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumSource {
    ExactFloquet,
    EffectiveFolded,
}

/// Sorted angles in (−π, π].
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiSpectrum<T: Real> {
    angles: Vec<T>,
    source: SpectrumSource,
}

impl<T: Real> QuasiSpectrum<T> {
    /// Wraps every angle into (−π, π] and sorts.
    pub fn new(angles: impl IntoIterator<Item = T>, source: SpectrumSource) -> Self {
        let mut angles: Vec<T> = angles.into_iter().map(wrap_angle).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
        Self { angles, source }
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Smallest gap between circular neighbours (including the wrap-around pair).
    pub fn min_adjacent_gap(&self) -> T {
        let n = self.angles.len();
        if n < 2 {
            return T::two_pi();
        }
        let wrap = self.angles[0] + T::two_pi() - self.angles[n - 1];
        self.angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(wrap, |acc, g| acc.min(g))
    }
}

/// Torsion factor `exp(−iαJz²/(2jT))` as its diagonal.
fn torsion_phases<T: Real>(p: &TopParams<T>) -> Vec<num_complex::Complex<T>> {
    let two_j = real::<T>(f64::from(p.spin.twice()));
    let coeff = p.alpha / (two_j * p.period());
    p.spin
        .m_values::<T>()
        .map(|m| ComplexField::exp(im(-coeff * m * m)))
        .collect()
}

/// Floquet operator `exp(−iβJx) exp(−iαJz²/(2jT))`.
pub fn build_floquet<T: Real>(p: &TopParams<T>) -> Result<CMatrix<T>> {
    let alg = build_spin_operators(p.spin);
    build_floquet_with(&alg, p, StepOrder::TorsionFirst)
}

/// Floquet operator with an explicit factor ordering, reusing `alg`.
pub fn build_floquet_with<T: Real>(alg: &SpinAlgebra<T>, p: &TopParams<T>, order: StepOrder) -> Result<CMatrix<T>> {
    if alg.spin() != p.spin {
        return Err(Error::DimensionMismatch {
            expected: p.spin.dim(),
            rows: alg.dim(),
            cols: alg.dim(),
        });
    }
    let mut f = hermitian_exp(alg.jx(), p.beta)?;
    let phases = torsion_phases(p);
    match order {
        StepOrder::TorsionFirst => {
            for (c, ph) in phases.into_iter().enumerate() {
                f.column_mut(c).iter_mut().for_each(|z| *z *= ph);
            }
        }
        StepOrder::KickFirst => {
            for (r, ph) in phases.into_iter().enumerate() {
                f.row_mut(r).iter_mut().for_each(|z| *z *= ph);
            }
        }
    }
    Ok(f)
}

/// Quasienergies `φ = −arg λ` of a unitary operator, folded into (−π, π].
pub fn quasienergies<T: Real>(f: &CMatrix<T>) -> Result<QuasiSpectrum<T>> {
    let n = linalg::ensure_unitary(f)?;
    let eigenvalues = unitary_eigenvalues(f, n)?;
    Ok(QuasiSpectrum::new(
        eigenvalues.into_iter().map(|l| -l.im.atan2(l.re)),
        SpectrumSource::ExactFloquet,
    ))
}

fn unitary_eigenvalues<T: Real>(f: &CMatrix<T>, n: usize) -> Result<Vec<num_complex::Complex<T>>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let values = match Schur::try_new(f.clone(), T::default_epsilon(), 100 * n + 1000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..n).map(|k| t[(k, k)]).collect()
        }
        // the shifted QR stalls on (near-)degenerate spectra such as F ≈ 1
        None => normal_eigenvalues(f, n)?,
    };
    if values.iter().any(|z: &num_complex::Complex<T>| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigenFailure { dim: n });
    }
    Ok(values)
}

/// Mixing angles tried for the Hermitian combination in [`normal_eigenvalues`].
const MIXING_SLOPES: [f64; 4] = [0.618_033_988_749_895, 0.414_213_562_373_095, std::f64::consts::FRAC_1_PI, 1.324_717_957_244_746];

/// Eigenvalues of a unitary (normal) matrix from the eigenvectors of the
/// Hermitian combination `(F + F†)/2 + t(F − F†)/2i`, which commutes with `F`.
/// A slope is accepted once `V†FV` is diagonal to within the unitarity tolerance.
fn normal_eigenvalues<T: Real>(f: &CMatrix<T>, n: usize) -> Result<Vec<num_complex::Complex<T>>> {
    let half: T = real(0.5);
    let cos_part = (f + f.adjoint()).map(|z| z * half);
    let sin_part = (f - f.adjoint()).map(|z| z * im(-half));
    for slope in MIXING_SLOPES {
        let h = &cos_part + linalg::scale(&sin_part, real(slope));
        let h = (&h + h.adjoint()).map(|z| z * half);
        let (_, v) = linalg::hermitian_eigen(&h)?;
        let d = v.adjoint() * f * &v;
        let off = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|(r, c)| r != c)
            .fold(T::zero(), |acc, (r, c)| acc.max(d[(r, c)].modulus()));
        if off <= T::unitary_tol() {
            return Ok((0..n).map(|k| d[(k, k)]).collect());
        }
    }
    Err(Error::EigenFailure { dim: n })
}

/// One-period Heisenberg map `F† O F`.
pub fn heisenberg_step<T: Real>(f: &CMatrix<T>, op: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = linalg::ensure_square(f)?;
    linalg::ensure_dim(op, n)?;
    Ok(f.adjoint() * op * f)
}
