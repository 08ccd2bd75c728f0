//! Thin wrappers over the dense eigensolver.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    m.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))
}

pub(crate) fn eigenvalues_2x2(m: &[[Complex64; 2]; 2]) -> Result<[Complex64; 2]> {
    let a = Mat::from_fn(2, 2, |i, j| m[i][j]);
    let ev = eigenvalues(&a)?;
    Ok([ev[0], ev[1]])
}
