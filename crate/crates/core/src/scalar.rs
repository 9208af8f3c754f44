//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type the library is generic over (`f32` or `f64`).
///
/// Validation tolerances depend on the precision, so each implementation
/// carries its own.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + std::fmt::Display + 'static
{
    /// Relative residual allowed when an input matrix is required to be Hermitian.
    fn hermitian_tol() -> Self;
    /// Relative residual allowed when an input matrix is required to be unitary.
    fn unitary_tol() -> Self;
}

impl Real for f64 {
    fn hermitian_tol() -> f64 {
        1e-10
    }
    fn unitary_tol() -> f64 {
        1e-8
    }
}

impl Real for f32 {
    fn hermitian_tol() -> f32 {
        1e-4
    }
    fn unitary_tol() -> f32 {
        1e-3
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts `T` back to `f64` (serialization, diagnostics).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}

/// Purely real complex number.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Purely imaginary complex number.
#[inline]
pub fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

/// Maps an angle onto the interval (−π, π].
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut r = x % two_pi;
    if r < T::zero() {
        r += two_pi;
    }
    if r > T::pi() {
        r -= two_pi;
    }
    r
}

/// Distance between two angles measured along the circle.
pub fn circular_distance<T: Real>(a: T, b: T) -> T {
    let two_pi = T::two_pi();
    let d = (a - b).abs() % two_pi;
    d.min(two_pi - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(0.0_f64), 0.0);
        assert!((wrap_angle(2.0 * PI)).abs() < 1e-15);
        assert!((wrap_angle(PI + 0.1) - (-PI + 0.1)).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(-7.0 * PI / 2.0) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn circular_distance_is_symmetric_and_short() {
        assert!((circular_distance(3.0_f64, -3.0) - (2.0 * PI - 6.0)).abs() < 1e-14);
        assert!((circular_distance(-3.0_f64, 3.0) - (2.0 * PI - 6.0)).abs() < 1e-14);
        assert_eq!(circular_distance(0.5_f64, 0.5), 0.0);
    }
}
