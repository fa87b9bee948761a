//! Small dense linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn identity(d: usize) -> DMatrix<f64> {
    DMatrix::identity(d, d)
}

pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn min_singular(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.min()
}

pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or(Error::Singular)
}

/// `m^k` for any integer `k` (negative powers need an invertible `m`).
pub fn int_pow(m: &DMatrix<f64>, k: i32) -> Result<DMatrix<f64>> {
    let base = if k < 0 { inverse(m)? } else { m.clone() };
    let mut acc = identity(m.nrows());
    for _ in 0..k.unsigned_abs() {
        acc = &acc * &base;
    }
    Ok(acc)
}

/// Smallest eigenvalue modulus.
pub fn min_eigen_modulus(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
