//! Uniform θ sampling and the discrete Fourier pair between mode lists and
//! tensor-grid fields `f(r_i, θ_j)`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{precondition, Result};
use crate::grid::CVec;

/// Complex field on the `n_r × m` tensor grid, stored row-major by radius.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub n_r: usize,
    pub m: usize,
    pub values: Vec<Complex64>,
}

impl PhysicalField {
    pub fn zeros(n_r: usize, m: usize) -> Self {
        Self {
            n_r,
            m,
            values: vec![Complex64::new(0.0, 0.0); n_r * m],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.m + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.values[i * self.m + j]
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self {
            n_r: self.n_r,
            m: self.m,
            values,
        }
    }

    /// Largest imaginary part, for checking that a field is real.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Angles `θ_j = 2πj/m`.
pub fn theta_samples(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * std::f64::consts::PI * j as f64 / m as f64).collect()
}

fn truncation(modes: usize) -> Result<usize> {
    if modes.is_multiple_of(2) {
        return Err(precondition(format!("mode list must have odd length 2K+1, got {modes}")));
    }
    Ok(modes / 2)
}

fn check_resolution(k_max: usize, m: usize) -> Result<()> {
    if 2 * k_max + 1 > m {
        return Err(precondition(format!("{m} angles cannot resolve modes up to |k| = {k_max} without aliasing")));
    }
    Ok(())
}

/// `f(r, θ_j) = Σ_k f_k(r) e^{ikθ_j}` for modes ordered `k = -K..=K`.
pub fn to_physical(modes: &[CVec], m: usize) -> Result<PhysicalField> {
    let k_max = truncation(modes.len())?;
    check_resolution(k_max, m)?;
    let n_r = modes.first().map_or(0, |f| f.len());
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(m);
    let mut out = PhysicalField::zeros(n_r, m);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n_r {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (idx, f) in modes.iter().enumerate() {
            let k = idx as i64 - k_max as i64;
            buf[k.rem_euclid(m as i64) as usize] += f[i];
        }
        fft.process(&mut buf);
        out.values[i * m..(i + 1) * m].copy_from_slice(&buf);
    }
    Ok(out)
}

/// Coefficients `f_k(r) = (1/m) Σ_j f(r, θ_j) e^{-ikθ_j}` for `k = -K..=K`.
pub fn to_modes(field: &PhysicalField, k_max: usize) -> Result<Vec<CVec>> {
    check_resolution(k_max, field.m)?;
    let m = field.m;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let mut modes = vec![CVec::zeros(field.n_r); 2 * k_max + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let scale = 1.0 / m as f64;
    for i in 0..field.n_r {
        buf.copy_from_slice(&field.values[i * m..(i + 1) * m]);
        fft.process(&mut buf);
        for (idx, f) in modes.iter_mut().enumerate() {
            let k = idx as i64 - k_max as i64;
            f[i] = buf[k.rem_euclid(m as i64) as usize] * scale;
        }
    }
    Ok(modes)
}
