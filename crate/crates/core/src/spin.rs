//! Angular momentum matrices, commutators, Hermitian exponentials and spin
//! coherent states.
//!
//! Every matrix in the crate uses the basis `|j, m⟩` ordered by
//! `m = j, j-1, ..., -j`, so row/column `k` carries `m = j - k`.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{im, re, real, to_f64, Real};

/// Spin quantum number `j`, stored as the integer `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    /// Accepts `j` when `2j` is a positive integer.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j <= 0.0 || (twice - twice.round()).abs() > 1e-9 || twice > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Self { twice })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn j<T: Real>(self) -> T {
        real(self.value())
    }

    /// Hilbert space dimension `2j + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Magnetic quantum numbers in basis order `j, j-1, ..., -j`.
    pub fn m_values<T: Real>(self) -> impl ExactSizeIterator<Item = T> {
        let j = self.value();
        (0..self.dim()).map(move |k| real(j - k as f64))
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// The three spin-`j` angular momentum matrices.
#[derive(Clone, Debug)]
pub struct SpinAlgebra<T: Real> {
    spin: Spin,
    jx: CMatrix<T>,
    jy: CMatrix<T>,
    jz: CMatrix<T>,
}

impl<T: Real> SpinAlgebra<T> {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn jx(&self) -> &CMatrix<T> {
        &self.jx
    }

    pub fn jy(&self) -> &CMatrix<T> {
        &self.jy
    }

    pub fn jz(&self) -> &CMatrix<T> {
        &self.jz
    }

    /// `Jz²`, diagonal with entries `m²`.
    pub fn jz_squared(&self) -> CMatrix<T> {
        linalg::diagonal(self.spin.m_values::<T>().map(|m| re(m * m)))
    }

    pub fn casimir(&self) -> CMatrix<T> {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }

    /// Largest residual among Hermiticity, the three commutation relations
    /// and the Casimir identity (absolute max-norm).
    pub fn algebra_residual(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for m in [&self.jx, &self.jy, &self.jz] {
            worst = worst.max(linalg::max_abs_diff(m, &m.adjoint()));
        }
        let i = im(T::one());
        let cyc = [
            (&self.jx, &self.jy, &self.jz),
            (&self.jy, &self.jz, &self.jx),
            (&self.jz, &self.jx, &self.jy),
        ];
        for (a, b, c) in cyc {
            let lhs = a * b - b * a;
            worst = worst.max(linalg::max_abs_diff(&lhs, &(c * i)));
        }
        let j = self.spin.j::<T>();
        let target = CMatrix::<T>::identity(n, n) * re(j * (j + T::one()));
        worst.max(linalg::max_abs_diff(&self.casimir(), &target))
    }
}

/// Builds `Jx, Jy, Jz` for spin `j` from the ladder operator `J+` with
/// `⟨m+1|J+|m⟩ = √(j(j+1) − m(m+1))`.
pub fn build_spin_operators<T: Real>(spin: Spin) -> SpinAlgebra<T> {
    let n = spin.dim();
    let j = spin.j::<T>();
    let m: Vec<T> = spin.m_values().collect();
    let mut raise = CMatrix::<T>::zeros(n, n);
    // column k holds |m_k⟩, row k-1 holds |m_k + 1⟩
    for k in 1..n {
        let mk = m[k];
        raise[(k - 1, k)] = re((j * (j + T::one()) - mk * (mk + T::one())).sqrt());
    }
    let lower = raise.adjoint();
    let half = linalg::half::<T>();
    let jx = (&raise + &lower) * re(half);
    let jy = (&raise - &lower) * im(-half);
    let jz = linalg::diagonal(m.iter().map(|&x| re(x)));
    SpinAlgebra { spin, jx, jy, jz }
}

/// `AB − BA`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = linalg::ensure_square(a)?;
    linalg::ensure_dim(b, n)?;
    Ok(a * b - b * a)
}

/// `exp(−i s H)` for Hermitian `H`, via its eigen-decomposition.
pub fn hermitian_exp<T: Real>(h: &CMatrix<T>, s: T) -> Result<CMatrix<T>> {
    linalg::ensure_hermitian(h)?;
    let (values, vectors) = linalg::hermitian_eigen(h)?;
    let phases: Vec<Complex<T>> = values
        .iter()
        .map(|&l| ComplexField::exp(im(-s * l)))
        .collect();
    let mut scaled = vectors.clone();
    for (c, ph) in phases.iter().enumerate() {
        scaled.column_mut(c).iter_mut().for_each(|z| *z *= ph);
    }
    Ok(scaled * vectors.adjoint())
}

/// A spin coherent state pointing along `(sinθ cosψ, sinθ sinψ, cosθ)`.
#[derive(Clone, Debug)]
pub struct CoherentState<T: Real> {
    theta: T,
    psi: T,
    amplitudes: CVector<T>,
}

impl<T: Real> CoherentState<T> {
    pub fn theta(&self) -> T {
        self.theta
    }

    /// Azimuth in `[0, 2π)`.
    pub fn psi(&self) -> T {
        self.psi
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    /// Real part of `⟨γ|O|γ⟩`.
    pub fn expectation(&self, op: &CMatrix<T>) -> Result<T> {
        linalg::ensure_dim(op, self.amplitudes.len())?;
        Ok(self.amplitudes.dotc(&(op * &self.amplitudes)).re)
    }

    /// `(⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩) / j`.
    pub fn scaled_moments(&self, alg: &SpinAlgebra<T>) -> Result<[T; 3]> {
        let j = alg.spin().j::<T>();
        Ok([
            self.expectation(alg.jx())? / j,
            self.expectation(alg.jy())? / j,
            self.expectation(alg.jz())? / j,
        ])
    }
}

/// Rotates the highest-weight state `|j, j⟩` by `θ` about the axis
/// `(−sinψ, cosψ, 0)`: `exp(−iθ(Jy cosψ − Jx sinψ))|j, j⟩`.
pub fn spin_coherent_state<T: Real>(alg: &SpinAlgebra<T>, theta: T, psi: T) -> Result<CoherentState<T>> {
    if !(theta >= T::zero() && theta <= T::pi()) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: to_f64(theta),
            expected: "[0, pi]",
        });
    }
    if !psi.is_finite() {
        return Err(Error::OutOfRange {
            name: "psi",
            value: to_f64(psi),
            expected: "a finite angle",
        });
    }
    let generator = alg.jy() * re(psi.cos()) - alg.jx() * re(psi.sin());
    let rotation = hermitian_exp(&generator, theta)?;
    let amplitudes: CVector<T> = rotation.column(0).into_owned();
    let two_pi = T::two_pi();
    let mut psi_n = psi % two_pi;
    if psi_n < T::zero() {
        psi_n += two_pi;
    }
    Ok(CoherentState {
        theta,
        psi: psi_n,
        amplitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, unitarity_residual};
    use std::f64::consts::PI;

    fn alg(j: f64) -> SpinAlgebra<f64> {
        build_spin_operators(Spin::new(j).unwrap())
    }

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn rejects_invalid_spin() {
        for j in [0.0, -1.0, 0.3, 1.25, f64::NAN, f64::INFINITY] {
            assert!(matches!(Spin::new(j), Err(Error::InvalidSpin(_))), "j = {j}");
        }
        assert!(Spin::from_twice(0).is_err());
        assert_eq!(Spin::new(1.5).unwrap().dim(), 4);
        assert_eq!(Spin::new(1.5).unwrap().to_string(), "3/2");
        assert_eq!(Spin::new(40.0).unwrap().to_string(), "40");
    }

    #[test]
    fn pauli_case() {
        let a = alg(0.5);
        let jz = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(-0.5)]);
        let jx = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.5), c(0.0)]);
        assert!(max_abs_diff(a.jz(), &jz) < 1e-15);
        assert!(max_abs_diff(a.jx(), &jx) < 1e-15);
    }

    #[test]
    fn spin_one_entries() {
        let a = alg(1.0);
        let s = 1.0 / 2f64.sqrt();
        for (r, col) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert!((a.jx()[(r, col)] - c(s)).norm() < 1e-15);
        }
        assert_eq!(a.jx()[(0, 2)], c(0.0));
        let diag: Vec<f64> = (0..3).map(|k| a.jz()[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn commutators() {
        let a = alg(3.0);
        let i = Complex::new(0.0, 1.0);
        let xy = commutator(a.jx(), a.jy()).unwrap();
        assert!(max_abs_diff(&xy, &(a.jz() * i)) < 1e-12);
        let zx = commutator(a.jz(), a.jx()).unwrap();
        assert!(max_abs_diff(&zx, &(a.jy() * i)) < 1e-12);
        assert_eq!(max_abs(&commutator(a.jx(), a.jx()).unwrap()), 0.0);
        let small = alg(1.0);
        assert!(matches!(
            commutator(a.jx(), small.jx()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn algebra_residual_small() {
        for j in [0.5, 1.0, 2.5, 7.0, 20.0] {
            let r = alg(j).algebra_residual();
            assert!(r < 1e-9 * j * j, "j = {j}: {r}");
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMatrix::<f64>::zeros(4, 4);
        let u = hermitian_exp(&z, 2.7).unwrap();
        assert!(max_abs_diff(&u, &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn exp_pauli_rotation() {
        let a = alg(0.5);
        let u = hermitian_exp(a.jx(), PI).unwrap();
        let expect = a.jx() * Complex::new(0.0, -2.0);
        assert!(max_abs_diff(&u, &expect) < 1e-14);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let a = alg(1.0);
        let bad = a.jx() * Complex::new(0.0, 1.0);
        assert!(matches!(hermitian_exp(&bad, 1.0), Err(Error::NotHermitian { .. })));
        let rect = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(hermitian_exp(&rect, 1.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn exp_group_property_and_unitarity() {
        let a = alg(4.0);
        let h = a.jx() * c(0.3) + a.jz_squared() * c(0.05) + a.jy() * a.jz() + a.jz() * a.jy();
        let u1 = hermitian_exp(&h, 0.4).unwrap();
        let u2 = hermitian_exp(&h, 1.1).unwrap();
        let u12 = hermitian_exp(&h, 1.5).unwrap();
        assert!(max_abs_diff(&(&u1 * &u2), &u12) < 1e-9);
        assert!(unitarity_residual(&u12) < 1e-10);
    }

    #[test]
    fn coherent_north_pole() {
        let a = alg(5.0);
        let s = spin_coherent_state(&a, 0.0, 1.3).unwrap();
        assert!((s.amplitudes()[0] - c(1.0)).norm() < 1e-14);
        for k in 1..a.dim() {
            assert!(s.amplitudes()[k].norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_equator() {
        let a = alg(6.0);
        let s = spin_coherent_state(&a, PI / 2.0, 0.0).unwrap();
        let [x, y, z] = s.scaled_moments(&a).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
        assert!(y.abs() < 1e-10 && z.abs() < 1e-10);
    }

    #[test]
    fn coherent_rejects_bad_theta() {
        let a = alg(1.0);
        assert!(spin_coherent_state(&a, -0.1, 0.0).is_err());
        assert!(spin_coherent_state(&a, 3.2, 0.0).is_err());
        assert!(spin_coherent_state(&a, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn coherent_psi_normalized() {
        let a = alg(1.0);
        let s = spin_coherent_state(&a, 1.0, -0.5).unwrap();
        assert!((s.psi() - (2.0 * PI - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn f32_algebra() {
        let a: SpinAlgebra<f32> = build_spin_operators(Spin::new(3.0).unwrap());
        assert!(a.algebra_residual() < 1e-4);
        let u = hermitian_exp(a.jx(), 0.7f32).unwrap();
        assert!(unitarity_residual(&u) < 1e-4);
    }
}
