//! Seeded random radial profiles that vanish at both walls.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::{CVec, RadialGrid};

/// Number of sine modes in a random profile.
pub const DEFAULT_MODES: usize = 16;

/// Generator of smooth random Dirichlet profiles
/// `Σ_j c_j j^{-2} sin(jπ(r-1)/(R-1))` with complex Gaussian `c_j`.
#[derive(Debug, Clone)]
pub struct DirichletSampler {
    rng: ChaCha8Rng,
    modes: usize,
}

impl DirichletSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            modes: DEFAULT_MODES,
        }
    }

    pub fn with_modes(seed: u64, modes: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            modes: modes.max(1),
        }
    }

    pub fn gaussian(&mut self) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re, im)
    }

    pub fn real_gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Random complex profile on `grid` with exact zeros at the walls.
    pub fn profile(&mut self, grid: &RadialGrid) -> CVec {
        let coeffs: Vec<Complex64> = (1..=self.modes).map(|j| self.gaussian() / (j * j) as f64).collect();
        let span = grid.aspect() - 1.0;
        let mut f = grid.sample_complex(|r| {
            let x = std::f64::consts::PI * (r - 1.0) / span;
            coeffs.iter().enumerate().map(|(j, c)| c * ((j + 1) as f64 * x).sin()).sum()
        });
        let n = f.len();
        f[0] = Complex64::new(0.0, 0.0);
        f[n - 1] = Complex64::new(0.0, 0.0);
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_dirichlet() {
        let g = RadialGrid::build(2.0, 24).unwrap();
        let a = DirichletSampler::new(7).profile(&g);
        let b = DirichletSampler::new(7).profile(&g);
        assert_eq!(a, b);
        assert_eq!(a[0], Complex64::new(0.0, 0.0));
        assert_eq!(a[23], Complex64::new(0.0, 0.0));
        assert!(g.l2(&a) > 0.0);
        let c = DirichletSampler::new(8).profile(&g);
        assert_ne!(a, c);
    }
}
