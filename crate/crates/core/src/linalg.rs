//! Thin wrappers over LAPACK through `ndarray-linalg`, plus a few small
//! complex-matrix helpers shared by the spectrum and oracle modules.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eig, EigVals, EigValsh, Inverse, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn lapack_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("{what}: {e}"))
}

/// Eigenvalues and right eigenvectors (columns) of a real square matrix.
pub fn eig_real(a: &Array2<f64>) -> Result<(Array1<Complex64>, Array2<Complex64>)> {
    a.eig().map_err(|e| lapack_err("real eigen-decomposition", e))
}

/// Eigenvalues and right eigenvectors (columns) of a complex square matrix.
pub fn eig_complex(a: &Array2<Complex64>) -> Result<(Array1<Complex64>, Array2<Complex64>)> {
    a.eig().map_err(|e| lapack_err("complex eigen-decomposition", e))
}

pub fn eigvals_complex(a: &Array2<Complex64>) -> Result<Array1<Complex64>> {
    a.eigvals().map_err(|e| lapack_err("complex eigenvalues", e))
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
pub fn eigvals_hermitian(a: &Array2<Complex64>) -> Result<Array1<f64>> {
    a.eigvalsh(UPLO::Lower)
        .map_err(|e| lapack_err("Hermitian eigenvalues", e))
}

pub fn inverse(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    a.inv().map_err(|e| lapack_err("matrix inverse", e))
}

pub fn adjoint(a: ArrayView2<'_, Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

pub fn max_abs(a: ArrayView2<'_, Complex64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b> = sum conj(a_i) b_i`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Scales `v` to unit norm with its largest-magnitude component real positive.
pub fn fix_gauge(v: &mut [Complex64]) {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-empty");
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}
