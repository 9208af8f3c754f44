//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type CVector<T> = DVector<Complex<T>>;

const EIGEN_MAX_SWEEPS_PER_DIM: usize = 1000;

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// Max-norm distance between two matrices of equal shape.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

pub(crate) fn ensure_square<T: Real>(m: &CMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_dim<T: Real>(m: &CMatrix<T>, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// `max |M - M†|` relative to `max(1, max |M|)`.
pub fn hermiticity_residual<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).modulus());
        }
    }
    worst / T::one().max(max_abs(m))
}

/// `max |U†U - I|`.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(n, n))
}

pub(crate) fn ensure_hermitian<T: Real>(m: &CMatrix<T>) -> Result<usize> {
    let n = ensure_square(m)?;
    let residual = hermiticity_residual(m);
    if !(residual <= T::hermitian_tol()) {
        return Err(Error::NotHermitian {
            residual: to_f64(residual),
        });
    }
    Ok(n)
}

pub(crate) fn ensure_unitary<T: Real>(u: &CMatrix<T>) -> Result<usize> {
    let n = ensure_square(u)?;
    let residual = unitarity_residual(u);
    if !(residual <= T::unitary_tol()) {
        return Err(Error::NotUnitary {
            residual: to_f64(residual),
        });
    }
    Ok(n)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is assumed Hermitian; callers validate first.
pub fn hermitian_eigen<T: Real>(h: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let n = ensure_square(h)?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(h.clone(), T::default_epsilon(), EIGEN_MAX_SWEEPS_PER_DIM * n)
        .ok_or(Error::EigenFailure { dim: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure { dim: n });
    }
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues only of a Hermitian matrix, ascending. Skips the eigenvector
/// accumulation, which dominates the cost of [`hermitian_eigen`].
pub fn hermitian_eigenvalues<T: Real>(h: &CMatrix<T>) -> Result<Vec<T>> {
    let n = ensure_square(h)?;
    // the values-only QR sweep has no iteration cap; it terminates for finite input
    if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigenFailure { dim: n });
    }
    let mut values: Vec<T> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.singular_values().iter().fold(T::zero(), |acc, s| acc.max(*s))
}

/// Diagonal matrix from complex entries.
pub(crate) fn diagonal<T: Real>(entries: impl ExactSizeIterator<Item = Complex<T>>) -> CMatrix<T> {
    let n = entries.len();
    CMatrix::from_diagonal(&CVector::from_iterator(n, entries))
}

/// `A * s` for real `s`.
pub(crate) fn scale<T: Real>(m: &CMatrix<T>, s: T) -> CMatrix<T> {
    m.map(|z| z * s)
}

pub(crate) fn half<T: Real>() -> T {
    real(0.5)
}
