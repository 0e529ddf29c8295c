//! Small dense helpers on top of nalgebra.
//!
//! Every matrix passed here is expressed in isometric coordinates, so plain
//! Euclidean singular values are the quadrature-weighted operator norms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{CMat, CVec};

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn sigma_min(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn norm2(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Unit right singular vector of the largest singular value.
pub fn top_right_singular_vector(m: &CMat) -> Result<CVec> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Conditioning("SVD did not return right singular vectors".into()))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    Ok(CVec::from_iterator(v_t.ncols(), v_t.row(idx).iter().map(|z| z.conj())))
}

/// `e^{M}` by scaling and squaring.
pub fn expm(m: &CMat) -> CMat {
    m.clone().exp()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Diagonal complex matrix from real entries.
pub fn diag(v: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0))))
}

/// Euclidean norm of a complex vector.
pub fn vnorm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn ensure_finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Conditioning(format!("{what} is not finite")))
    }
}
