//! Empirical constants in the weighted elliptic estimates for the stream
//! function of a single mode.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::grid::{CVec, RadialGrid};
use crate::operators::{assemble_lnu, assemble_zero_mode, FlowParams};
use crate::random::DirichletSampler;

/// Largest observed left/right ratio of each inequality for one `k`.
///
/// For `φ` solving `(∂_r² - (k²-¼)/r²)φ = ω` with Dirichlet walls:
/// * `energy_vs_pairing`: `(‖φ'‖² + k²‖φ/r‖²) / |⟨ω, φ⟩|`
/// * `pairing_vs_weighted`: `|⟨ω, φ⟩| / (k^{-2}‖rω‖²)`
/// * `energy_vs_l1`: `(‖φ'‖² + k²‖φ/r‖²) / (|k|^{-1}‖r^{1/2}ω‖²_{L¹})`
/// * `sup_bound`: `(‖r^{1/2}φ'‖_∞ + |k|‖r^{-1/2}φ‖_∞) / ((R/(R-1))^{1/2}|k|^{-1/2}‖rω‖)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticConstants {
    pub k: i64,
    pub energy_vs_pairing: f64,
    pub pairing_vs_weighted: f64,
    pub energy_vs_l1: f64,
    pub sup_bound: f64,
    pub samples: usize,
    pub skipped: usize,
}

/// Largest observed `‖φ'‖_∞ / ((R/(R-1))^{1/2}(1 + log R)‖r^{3/2}ω‖)` for the
/// axisymmetric problem `(∂_r² + r^{-1}∂_r)φ = ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisymmetricConstant {
    pub sup_bound: f64,
    pub samples: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticReport {
    pub aspect: f64,
    pub n: usize,
    pub per_k: Vec<EllipticConstants>,
    pub axisymmetric: AxisymmetricConstant,
}

impl EllipticConstants {
    pub fn as_array(&self) -> [f64; 4] {
        [self.energy_vs_pairing, self.pairing_vs_weighted, self.energy_vs_l1, self.sup_bound]
    }
}

fn elliptic_params(aspect: f64) -> FlowParams {
    FlowParams {
        nu: 1.0,
        a: 0.0,
        b: 0.0,
        aspect,
        g_scale: 1.0,
        k_max: 1,
    }
}

/// Constants for mode `k` over the given vorticity samples.
pub fn elliptic_constants(grid: &RadialGrid, k: i64, omegas: &[CVec]) -> Result<EllipticConstants> {
    if k == 0 {
        return Err(precondition("use axisymmetric_constant for k = 0"));
    }
    let op = assemble_lnu(&elliptic_params(grid.aspect()), k, grid)?;
    let kf = (k as f64).abs();
    let aspect = grid.aspect();
    let geom = (aspect / (aspect - 1.0)).sqrt();
    let mut out = EllipticConstants {
        k,
        energy_vs_pairing: 0.0,
        pairing_vs_weighted: 0.0,
        energy_vs_l1: 0.0,
        sup_bound: 0.0,
        samples: 0,
        skipped: 0,
    };
    for omega in omegas {
        let r_omega = grid.l2_rpow(omega, 1.0);
        if r_omega == 0.0 {
            out.skipped += 1;
            continue;
        }
        let phi = op.solve_delta(omega)?;
        let dphi = grid.differentiate(&phi);
        let energy = grid.l2(&dphi).powi(2) + kf * kf * grid.l2_over_r(&phi).powi(2);
        let pairing = grid.inner_product(omega, &phi)?.norm();
        let l1 = grid.l1_rpow(omega, 0.5);
        let sup = grid.linf_rpow(&dphi, 0.5) + kf * grid.linf_rpow(&phi, -0.5);
        out.energy_vs_pairing = out.energy_vs_pairing.max(energy / pairing);
        out.pairing_vs_weighted = out.pairing_vs_weighted.max(pairing / (r_omega * r_omega / (kf * kf)));
        out.energy_vs_l1 = out.energy_vs_l1.max(energy / (l1 * l1 / kf));
        out.sup_bound = out.sup_bound.max(sup / (geom * r_omega / kf.sqrt()));
        out.samples += 1;
    }
    Ok(out)
}

/// Constant for the axisymmetric estimate over the given samples.
pub fn axisymmetric_constant(grid: &RadialGrid, omegas: &[CVec]) -> Result<AxisymmetricConstant> {
    let op = assemble_zero_mode(&elliptic_params(grid.aspect()), grid)?;
    let aspect = grid.aspect();
    let factor = (aspect / (aspect - 1.0)).sqrt() * (1.0 + aspect.ln());
    let mut out = AxisymmetricConstant {
        sup_bound: 0.0,
        samples: 0,
        skipped: 0,
    };
    for omega in omegas {
        let rhs = grid.l2_rpow(omega, 1.5);
        if rhs == 0.0 {
            out.skipped += 1;
            continue;
        }
        let phi = op.solve_delta(omega)?;
        let sup = grid.linf(&grid.differentiate(&phi));
        out.sup_bound = out.sup_bound.max(sup / (factor * rhs));
        out.samples += 1;
    }
    Ok(out)
}

/// Runs all elliptic checks on `trials` seeded random Dirichlet vorticities per `k`.
pub fn verify_elliptic_estimates(grid: &RadialGrid, k_list: &[i64], trials: usize, seed: u64) -> Result<EllipticReport> {
    if trials < 10 {
        return Err(precondition(format!("need at least 10 trials, got {trials}")));
    }
    let mut sampler = DirichletSampler::new(seed);
    let omegas: Vec<CVec> = (0..trials).map(|_| sampler.profile(grid)).collect();
    let per_k = k_list.iter().map(|&k| elliptic_constants(grid, k, &omegas)).collect::<Result<Vec<_>>>()?;
    let axisymmetric = axisymmetric_constant(grid, &omegas)?;
    Ok(EllipticReport {
        aspect: grid.aspect(),
        n: grid.n(),
        per_k,
        axisymmetric,
    })
}
