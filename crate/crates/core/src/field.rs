//! Radial profiles of single azimuthal modes and the change of variables
//! `f_k = r^{1/2} e^{ikAt} f̂_k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{CVec, RadialGrid};

/// Which variable a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rep {
    /// Plain Fourier coefficient `f̂_k(r)`.
    Hat,
    /// Rotating-frame variable `r^{1/2} e^{ikAt} f̂_k(r)`.
    Weighted,
}

/// Direction of [`mode_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HatToWeighted,
    WeightedToHat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeField {
    pub k: i64,
    pub values: CVec,
    pub rep: Rep,
}

impl ModeField {
    pub fn new(k: i64, values: CVec, rep: Rep) -> Self {
        Self { k, values, rep }
    }

    pub fn zeros(k: i64, n: usize, rep: Rep) -> Self {
        Self {
            k,
            values: CVec::zeros(n),
            rep,
        }
    }
}

/// Applies the weighted change of variables at time `t` with rotation `a`.
/// A profile already in the target representation is returned unchanged.
pub fn mode_transform(f: &ModeField, grid: &RadialGrid, a: f64, t: f64, dir: Direction) -> ModeField {
    let target = match dir {
        Direction::HatToWeighted => Rep::Weighted,
        Direction::WeightedToHat => Rep::Hat,
    };
    if f.rep == target {
        return f.clone();
    }
    let phase = Complex64::from_polar(1.0, f.k as f64 * a * t);
    let values = match dir {
        Direction::HatToWeighted => scale_by(&f.values, grid, 0.5, phase),
        Direction::WeightedToHat => scale_by(&f.values, grid, -0.5, phase.conj()),
    };
    ModeField { k: f.k, values, rep: target }
}

/// `r^p · c · f` at every node.
pub(crate) fn scale_by(f: &CVec, grid: &RadialGrid, p: f64, c: Complex64) -> CVec {
    CVec::from_iterator(f.len(), grid.nodes().iter().zip(f.iter()).map(|(&r, v)| v * c * r.powf(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::DirichletSampler;

    #[test]
    fn zero_time_is_pure_scaling() {
        let g = RadialGrid::build(3.0, 16).unwrap();
        let f = ModeField::new(2, DirichletSampler::new(1).profile(&g), Rep::Hat);
        let w = mode_transform(&f, &g, 5.0, 0.0, Direction::HatToWeighted);
        for (i, &r) in g.nodes().iter().enumerate() {
            assert!((w.values[i] - f.values[i] * r.sqrt()).norm() < 1e-15);
        }
    }

    #[test]
    fn round_trip_and_modulus() {
        let g = RadialGrid::build(2.0, 20).unwrap();
        let f = ModeField::new(-3, DirichletSampler::new(2).profile(&g), Rep::Hat);
        for &(a, t) in &[(0.0, 1.0), (1.0, 0.7), (-2.5, 13.0)] {
            let w = mode_transform(&f, &g, a, t, Direction::HatToWeighted);
            assert_eq!(w.rep, Rep::Weighted);
            let back = mode_transform(&w, &g, a, t, Direction::WeightedToHat);
            assert!((&back.values - &f.values).iter().all(|z| z.norm() < 1e-14));
            for (i, &r) in g.nodes().iter().enumerate() {
                assert!((w.values[i].norm() - r.sqrt() * f.values[i].norm()).abs() < 1e-14);
            }
        }
    }
}
