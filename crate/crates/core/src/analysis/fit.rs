//! Least-squares power-law fits in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fit of `log y = slope · log x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(log x, log y)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
    /// Number of input pairs dropped for being nonpositive or non-finite.
    pub dropped: usize,
}

pub const MIN_POINTS: usize = 4;

/// Fits a power law to `(x, y)` pairs; nonpositive entries are dropped.
pub fn fit_power_law(data: &[(f64, f64)]) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = data
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let dropped = data.len() - points.len();
    let (slope, intercept, r_squared) = fit_line(&points)?;
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        points,
        dropped,
    })
}

/// Ordinary least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < MIN_POINTS {
        return Err(Error::Insufficient(format!(
            "fit needs at least {MIN_POINTS} usable points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Insufficient("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok((slope, intercept, r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cube_root_law() {
        let data: Vec<(f64, f64)> = [1e-4, 1e-3, 1e-2, 1e-1, 1.0].iter().map(|&x: &f64| (x, 3.0 * x.cbrt())).collect();
        let fit = fit_power_law(&data).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_and_filtering() {
        let data = vec![(1.0, 2.0), (2.0, 2.0), (3.0, 2.0), (4.0, 2.0), (-1.0, 2.0), (5.0, 0.0)];
        let fit = fit_power_law(&data).unwrap();
        assert!(fit.slope.abs() < 1e-14);
        assert_eq!(fit.dropped, 2);
        assert!(matches!(fit_power_law(&data[..3]), Err(Error::Insufficient(_))));
    }
}
