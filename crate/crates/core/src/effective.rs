//! Effective static Hamiltonian and kick operator of a delta-kicked system,
//! truncated at second order in `1/ω`.
//!
//! The one-period propagator is factorised as
//! `U(0 → T) = exp(−iF̂) exp(−iĤ_eff T) exp(iF̂)`, where `F̂` is the periodic
//! zero-mean kick generator evaluated at the kick instants. For a drive
//! `Ĥ(t) = Ĥ0 + V̂ Σ δ(t − nT)` every Fourier component equals `V̂/T`, and
//!
//! ```text
//! Ĥ_eff = Ĥ0 + V̂/T + [[V̂, Ĥ0], V̂] / (ωT)² · Σ 1/n²
//! F̂(t)  = (2V̂/ωT) Σ sin(nωt)/n − (2i/ω²T) [V̂, Ĥ0] Σ cos(nωt)/n²
//! ```
//!
//! with `Σ 1/n² = π²/6`, i.e. a `1/24` prefactor on the double commutator.

use crate::error::{Error, Result};
use crate::floquet::{build_floquet, TopParams};
use crate::linalg::{self, CMatrix};
use crate::scalar::{im, real, to_f64, Real};
use crate::spin::{build_spin_operators, commutator, hermitian_exp, spin_coherent_state, Spin, SpinAlgebra};

/// `Ĥ(t) = Ĥ0 + V̂ Σ_n δ(t − n·period)`.
#[derive(Clone, Debug)]
pub struct DriveSpec<T: Real> {
    h0: CMatrix<T>,
    v: CMatrix<T>,
    period: T,
}

impl<T: Real> DriveSpec<T> {
    pub fn new(h0: CMatrix<T>, v: CMatrix<T>, period: T) -> Result<Self> {
        let n = linalg::ensure_hermitian(&h0)?;
        linalg::ensure_dim(&v, n)?;
        linalg::ensure_hermitian(&v)?;
        if !(period > T::zero() && period.is_finite()) {
            return Err(Error::OutOfRange {
                name: "period",
                value: to_f64(period),
                expected: "(0, inf)",
            });
        }
        Ok(Self { h0, v, period })
    }

    pub fn h0(&self) -> &CMatrix<T> {
        &self.h0
    }

    pub fn v(&self) -> &CMatrix<T> {
        &self.v
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn omega(&self) -> T {
        T::two_pi() / self.period
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }
}

/// Effective Hamiltonian and kick generator at the kick instants.
#[derive(Clone, Debug)]
pub struct EffectiveOperators<T: Real> {
    pub h_eff: CMatrix<T>,
    pub f_kick: CMatrix<T>,
}

fn basel<T: Real>() -> T {
    T::pi() * T::pi() / real(6.0)
}

/// Closed-form effective operators for a delta-kicked drive.
///
/// `f_kick` takes the term-wise series values at `t = 0`: the sine series
/// vanishes and the cosine series equals `π²/6`.
pub fn delta_kick_effective<T: Real>(d: &DriveSpec<T>) -> Result<EffectiveOperators<T>> {
    let omega = d.omega();
    let t = d.period;
    let v_h0 = commutator(&d.v, &d.h0)?;
    let nested = commutator(&v_h0, &d.v)?;
    let second = basel::<T>() / (omega * omega * t * t);
    let h_eff = &d.h0 + linalg::scale(&d.v, T::one() / t) + linalg::scale(&nested, second);
    let kick = real::<T>(-2.0) * basel::<T>() / (omega * omega * t);
    let f_kick = &v_h0 * im(kick);
    Ok(EffectiveOperators { h_eff, f_kick })
}

/// Term-by-term evaluation of the general second-order expansion with
/// `V̂_n = V̂/T` for `|n| ≤ n_max` and zero beyond.
#[derive(Clone, Debug)]
pub struct FourierEffective<T: Real> {
    pub h_eff: CMatrix<T>,
    pub f_kick: CMatrix<T>,
    /// `(1/ω) Σ (1/n) [V̂_n, V̂_−n]`.
    pub first_order: CMatrix<T>,
    /// `(1/2ω²) Σ (1/n²) ([[V̂_n, Ĥ0], V̂_−n] + h.c.)`.
    pub second_order: CMatrix<T>,
    /// The two triple-commutator double sums.
    pub triple: CMatrix<T>,
}

/// Harmonic weights of the truncated double sums.
struct SeriesWeights<T> {
    harmonic: T,
    inverse_squares: T,
    /// `Σ_{n,m≥1, n+m≤N} 1/(nm)`
    pair_sum_bounded: T,
    /// `Σ_{n,m=1..N} 1/(nm)`
    pair_sum_full: T,
    /// `Σ_{n,m≥1, n+m≤N} 1/(n(n+m))`
    kick_sum_sum: T,
    /// `Σ_{n≠m} 1/(n(n−m))`
    kick_sum_diff: T,
}

impl<T: Real> SeriesWeights<T> {
    fn new(n_max: usize) -> Self {
        // partial harmonic numbers H_0..H_N
        let mut h = vec![0.0f64; n_max + 1];
        for n in 1..=n_max {
            h[n] = h[n - 1] + 1.0 / n as f64;
        }
        let big_h = h[n_max];
        let mut inverse_squares = 0.0;
        let mut bounded = 0.0;
        let mut kick_sum = 0.0;
        let mut kick_diff = 0.0;
        // summed from small terms upward
        for n in (1..=n_max).rev() {
            let nf = n as f64;
            inverse_squares += 1.0 / (nf * nf);
            bounded += h[n_max - n] / nf;
            kick_sum += (big_h - h[n]) / nf;
            kick_diff += (h[n - 1] - h[n_max - n]) / nf;
        }
        Self {
            harmonic: real(big_h),
            inverse_squares: real(inverse_squares),
            pair_sum_bounded: real(bounded),
            pair_sum_full: real(big_h * big_h),
            kick_sum_sum: real(kick_sum),
            kick_sum_diff: real(kick_diff),
        }
    }
}

/// Second-order expansion with the Fourier series truncated at `n_max`.
///
/// The first-order and triple-commutator contributions vanish identically for
/// delta kicks; they are still evaluated from the commutators.
pub fn fourier_effective<T: Real>(h0: &CMatrix<T>, v: &CMatrix<T>, period: T, n_max: usize) -> Result<FourierEffective<T>> {
    if n_max == 0 {
        return Err(Error::OutOfRange {
            name: "n_max",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let d = DriveSpec::new(h0.clone(), v.clone(), period)?;
    let w = SeriesWeights::<T>::new(n_max);
    let omega = d.omega();
    let omega2 = omega * omega;
    let vn = linalg::scale(v, T::one() / period);
    let two: T = real(2.0);

    let h_static = h0 + &vn;
    let first_order = linalg::scale(&commutator(&vn, &vn)?, w.harmonic / omega);

    let nested = commutator(&commutator(&vn, h0)?, &vn)?;
    let nested_hc = nested.adjoint();
    let second_order = linalg::scale(&(&nested + &nested_hc), w.inverse_squares / (two * omega2));

    let inner = commutator(&vn, &commutator(&vn, &vn)?)?;
    let triple_raw = linalg::scale(&inner, w.pair_sum_bounded) - linalg::scale(&inner, two * w.pair_sum_full);
    let triple_raw_hc = triple_raw.adjoint();
    let triple = linalg::scale(&(&triple_raw + &triple_raw_hc), T::one() / (real::<T>(3.0) * omega2));

    let h_eff = &h_static + &first_order + &second_order + &triple;

    // F̂(0): 1/(iω) Σ (V_n − V_−n)/n
    let minus_i = im(-T::one());
    // every harmonic of a δ-kick is V/T, so this term vanishes identically
    let (v_plus, v_minus) = (&vn, &vn);
    let kick_first = (v_plus - v_minus) * (minus_i * w.harmonic / omega);
    let with_h = commutator(&vn, &h_static)?;
    let with_h_diff = &with_h - with_h.adjoint();
    let kick_second = &with_h_diff * (minus_i * w.inverse_squares / omega2);
    let vv = commutator(&vn, &vn)?;
    let vv_diff = &vv - vv.adjoint();
    let kick_pairs = &vv_diff * (minus_i * (w.kick_sum_sum + w.kick_sum_diff) / (two * omega2));
    let f_kick = kick_first + kick_second + kick_pairs;

    Ok(FourierEffective {
        h_eff,
        f_kick,
        first_order,
        second_order,
        triple,
    })
}

/// Kicked-top effective Hamiltonian and kick generator with their parameters.
#[derive(Clone, Debug)]
pub struct EffectiveModel<T: Real> {
    pub h_eff: CMatrix<T>,
    pub f_kick: CMatrix<T>,
    pub params: TopParams<T>,
}

/// `Ĥ0 = α Jz² / (2jT)` and `V̂ = β Jx`.
pub fn kicked_top_drive<T: Real>(alg: &SpinAlgebra<T>, p: &TopParams<T>) -> Result<DriveSpec<T>> {
    let two_j: T = real(f64::from(p.spin.twice()));
    let h0 = linalg::scale(&alg.jz_squared(), p.alpha / (two_j * p.period()));
    let v = linalg::scale(alg.jx(), p.beta);
    DriveSpec::new(h0, v, p.period())
}

/// Closed form:
/// `Ĥ_eff = (α/2j)Jz² + βJx − (αβ²/24j)(Jz² − Jy²)`,
/// `F̂ = −(αβ/24j)(JyJz + JzJy)`.
pub fn kicked_top_effective<T: Real>(p: &TopParams<T>) -> EffectiveModel<T> {
    let alg = build_spin_operators(p.spin);
    kicked_top_effective_with(&alg, p)
}

pub fn kicked_top_effective_with<T: Real>(alg: &SpinAlgebra<T>, p: &TopParams<T>) -> EffectiveModel<T> {
    let j = p.spin.j::<T>();
    let (alpha, beta) = (p.alpha, p.beta);
    let jz2 = alg.jz_squared();
    let jy2 = alg.jy() * alg.jy();
    let c24: T = real(24.0);
    let two: T = real(2.0);
    let h_eff = linalg::scale(&jz2, alpha / (two * j)) + linalg::scale(alg.jx(), beta)
        - linalg::scale(&(&jz2 - &jy2), alpha * beta * beta / (c24 * j));
    let anti = alg.jy() * alg.jz() + alg.jz() * alg.jy();
    let f_kick = linalg::scale(&anti, -alpha * beta / (c24 * j));
    EffectiveModel {
        h_eff,
        f_kick,
        params: *p,
    }
}

/// Kick generator `F̂(t)` of a delta-kicked drive for `t` strictly inside a period.
pub fn drive_kick_operator_at<T: Real>(d: &DriveSpec<T>, t: T) -> Result<CMatrix<T>> {
    if !(t > T::zero() && t < d.period) {
        return Err(Error::OutOfRange {
            name: "t",
            value: to_f64(t),
            expected: "(0, T)",
        });
    }
    let omega = d.omega();
    let x = omega * t;
    let pi = T::pi();
    let quarter: T = real(0.25);
    // Σ sin(nx)/n and Σ cos(nx)/n² on (0, 2π)
    let sine_sum = (pi - x) * linalg::half();
    let cosine_sum = basel::<T>() - pi * x * linalg::half() + x * x * quarter;
    let v_h0 = commutator(&d.v, &d.h0)?;
    let two: T = real(2.0);
    let kick = linalg::scale(&d.v, two * sine_sum / (omega * d.period));
    Ok(kick + &v_h0 * im(-two * cosine_sum / (omega * omega * d.period)))
}

/// Kicked-top `F̂(t)` for `0 < t < T`; at the kick instants use [`EffectiveModel::f_kick`].
pub fn kick_operator_at<T: Real>(p: &TopParams<T>, t: T) -> Result<CMatrix<T>> {
    let alg = build_spin_operators(p.spin);
    drive_kick_operator_at(&kicked_top_drive(&alg, p)?, t)
}

/// `exp(−iF̂) exp(−iĤ_eff T) exp(iF̂)`.
pub fn reconstruct_floquet<T: Real>(m: &EffectiveModel<T>) -> Result<CMatrix<T>> {
    let enter = hermitian_exp(&m.f_kick, -T::one())?;
    let exit = hermitian_exp(&m.f_kick, T::one())?;
    let bulk = hermitian_exp(&m.h_eff, m.params.period())?;
    Ok(exit * bulk * enter)
}

/// Operator-norm distance between the exact Floquet operator and the
/// reconstructed one.
pub fn reconstruction_distance<T: Real>(p: &TopParams<T>) -> Result<T> {
    let exact = build_floquet(p)?;
    let approx = reconstruct_floquet(&kicked_top_effective(p))?;
    Ok(linalg::operator_norm(&(exact - approx)))
}

/// Sorted eigenvalues of `Ĥ_eff`.
pub fn effective_spectrum<T: Real>(m: &EffectiveModel<T>) -> Result<Vec<T>> {
    linalg::ensure_hermitian(&m.h_eff)?;
    linalg::hermitian_eigenvalues(&m.h_eff)
}

/// `⟨γ|Ĥ_eff|γ⟩ / j` for the coherent state at `(θ, ψ)`, one value per spin.
pub fn classical_limit_check<T: Real>(alpha: T, beta: T, theta: T, psi: T, spins: &[Spin]) -> Result<Vec<T>> {
    spins
        .iter()
        .map(|&spin| {
            let p = TopParams::new(alpha, beta, spin)?;
            let alg = build_spin_operators(spin);
            let model = kicked_top_effective_with(&alg, &p);
            let state = spin_coherent_state(&alg, theta, psi)?;
            Ok(state.expectation(&model.h_eff)? / spin.j::<T>())
        })
        .collect()
}
