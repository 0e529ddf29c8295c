//! Resolvent solves `(𝓛 - ikBλ)ω = F` and worst-case ratios for the four
//! resolvent inequalities.
//!
//! With `c' = 0` the inequalities read, for `κ = |kB|`:
//! 1. `ν^{2/3}κ^{1/3}‖ω'‖ + ν^{1/3}κ^{2/3}‖ω/r‖ ≤ C‖rF‖`
//! 2. `ν^{1/6}κ^{5/6}|k|^{1/2}(‖φ'‖ + |k|‖φ/r‖) ≤ C R²[(ν/κ)^{1/6}(log R)^{1/2} + 1]‖rF‖`
//! 3. `ν‖ω‖_{H_r^1} + ν^{2/3}κ^{1/3}‖ω/r‖ ≤ C‖F‖_{H_r^{-1}}`
//! 4. `ν^{1/2}κ^{1/2}‖φ'‖ + ν^{1/2}|k|κ^{1/2}‖φ/r‖ ≤ C R²‖F‖_{H_r^{-1}}`
//!
//! The worst case over `F` is searched among seeded random profiles and the
//! top singular directions of each solution map, which bound the supremum
//! from below and are usually within a few percent of it.

use nalgebra::{DMatrix, LU};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::fit::{fit_power_law, ScalingFit};
use crate::error::{check_len, domain, precondition, Error, Result};
use crate::field::{ModeField, Rep};
use crate::grid::{CMat, CVec, RadialGrid};
use crate::linalg::{diag, to_complex, top_right_singular_vector, vnorm};
use crate::operators::{assemble_lnu, FlowParams, OperatorBundle};
use crate::random::DirichletSampler;

/// Norms of one resolvent solve and the left/right ratio of each inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventSample {
    pub lambda: f64,
    /// `(‖rF‖, ‖F‖_{H_r^{-1}})`.
    pub f_norms: (f64, f64),
    /// `(‖ω'‖, ‖ω/r‖, ‖φ'‖, ‖φ/r‖, ‖ω‖_{H_r^1})`.
    pub sol_norms: (f64, f64, f64, f64, f64),
    pub ratios: [f64; 4],
}

/// Worst-case ratios at one viscosity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventPoint {
    pub nu: f64,
    pub worst: [f64; 4],
    pub worst_lambda: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventReport {
    pub k: i64,
    pub points: Vec<ResolventPoint>,
    /// One log-log fit of worst ratio against `ν` per inequality.
    pub fits: Vec<ScalingFit>,
}

/// Solves `(𝓛 - ikBλ)ω = F` and returns `(ω, φ)` in the weighted representation.
pub fn solve_resolvent(params: &FlowParams, k: i64, lambda: f64, f: &ModeField, grid: &RadialGrid) -> Result<(ModeField, ModeField)> {
    let op = assemble_lnu(params, k, grid)?;
    let (omega, phi) = solve_with(&op, lambda, &f.values)?;
    Ok((ModeField::new(k, omega, Rep::Weighted), ModeField::new(k, phi, Rep::Weighted)))
}

/// `𝓛 - ikBλ` in isometric coordinates.
pub fn shifted(op: &OperatorBundle, lambda: f64) -> CMat {
    let mut a = op.l_iso().clone();
    let s = Complex64::new(0.0, op.k as f64 * op.b() * lambda);
    for j in 0..a.nrows() {
        a[(j, j)] -= s;
    }
    a
}

pub(crate) fn solve_with(op: &OperatorBundle, lambda: f64, f: &CVec) -> Result<(CVec, CVec)> {
    check_len(op.dim() + 2, f.len())?;
    let a = shifted(op, lambda);
    let rhs = op.to_iso(f);
    let lu = LU::new(a.clone());
    let u = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Conditioning(format!("resolvent singular at lambda = {lambda}")))?;
    let resid = vnorm(&(&a * &u - &rhs));
    let scale = vnorm(&rhs);
    if !(resid <= 1e-10 * scale.max(f64::MIN_POSITIVE)) && scale > 0.0 {
        return Err(Error::Conditioning(format!("resolvent residual {resid:e} too large")));
    }
    let omega = op.from_iso(&u);
    let phi = op.solve_delta(&omega)?;
    Ok((omega, phi))
}

/// Precomputed maps from a forcing in isometric coordinates to the norms
/// entering the four inequalities at one `λ`.
struct RatioMaps {
    lambda: f64,
    /// Forcing to `ω̂`.
    to_omega: CMat,
    /// Forcing to `φ̂`.
    to_phi: CMat,
    grad: CMat,
    inv_r: CMat,
    r_diag: CMat,
    /// `Lᵀ` with `L Lᵀ` the `H_r^1` Gram matrix.
    h1_factor_t: CMat,
    h1_factor: CMat,
    coeffs: Coefficients,
}

#[derive(Clone, Copy)]
struct Coefficients {
    a1: f64,
    b1: f64,
    c2: f64,
    k: f64,
    rhs2: f64,
    nu: f64,
    b3: f64,
    c4: f64,
    rhs4: f64,
}

impl Coefficients {
    fn new(params: &FlowParams, k: i64) -> Self {
        let nu = params.nu;
        let kf = (k as f64).abs();
        let kappa = (k as f64 * params.b).abs();
        let aspect = params.aspect;
        let r2 = aspect * aspect;
        Self {
            a1: nu.powf(2.0 / 3.0) * kappa.cbrt(),
            b1: nu.cbrt() * kappa.powf(2.0 / 3.0),
            c2: nu.powf(1.0 / 6.0) * kappa.powf(5.0 / 6.0) * kf.sqrt(),
            k: kf,
            rhs2: r2 * ((nu / kappa).powf(1.0 / 6.0) * aspect.ln().sqrt() + 1.0),
            nu,
            b3: nu.powf(2.0 / 3.0) * kappa.cbrt(),
            c4: nu.sqrt() * kappa.sqrt(),
            rhs4: r2,
        }
    }
}

impl RatioMaps {
    fn new(op: &OperatorBundle, grid: &RadialGrid, coeffs: Coefficients, lambda: f64) -> Result<Self> {
        let a = shifted(op, lambda);
        let to_omega = a
            .try_inverse()
            .ok_or_else(|| Error::Conditioning(format!("resolvent singular at lambda = {lambda}")))?;
        let to_phi = to_complex(&op.delta_inverse()) * &to_omega;
        let r = op.interior_r();
        let l = grid.h1r_gram().l();
        Ok(Self {
            lambda,
            to_omega,
            to_phi,
            grad: to_complex(op.grad()),
            inv_r: diag(&r.iter().map(|x| 1.0 / x).collect::<Vec<_>>()),
            r_diag: diag(r),
            h1_factor_t: to_complex(&l.transpose()),
            h1_factor: to_complex(&l),
            coeffs,
        })
    }

    fn sample(&self, f_iso: &CVec, h1_inv: &DMatrix<f64>) -> ResolventSample {
        let c = self.coeffs;
        let w = &self.to_omega * f_iso;
        let p = &self.to_phi * f_iso;
        let dw = vnorm(&(&self.grad * &w));
        let wr = vnorm(&(&self.inv_r * &w));
        let dp = vnorm(&(&self.grad * &p));
        let pr = vnorm(&(&self.inv_r * &p));
        let wh1 = vnorm(&(&self.h1_factor_t * &w));
        let rf = vnorm(&(&self.r_diag * f_iso));
        let fdual = vnorm(&(to_complex(h1_inv) * f_iso));
        let ratios = [
            (c.a1 * dw + c.b1 * wr) / rf,
            c.c2 * (dp + c.k * pr) / (c.rhs2 * rf),
            (c.nu * wh1 + c.b3 * wr) / fdual,
            c.c4 * (dp + c.k * pr) / (c.rhs4 * fdual),
        ];
        ResolventSample {
            lambda: self.lambda,
            f_norms: (rf, fdual),
            sol_norms: (dw, wr, dp, pr, wh1),
            ratios,
        }
    }

    /// Forcings along the top singular directions of each solution map.
    fn extremal_forcings(&self) -> Result<Vec<CVec>> {
        let c = self.coeffs;
        let pre_l2 = &self.inv_r;
        let pre_dual = &self.h1_factor;
        let mut out = Vec::new();
        for pre in [pre_l2, pre_dual] {
            let w = &self.to_omega * pre;
            let p = &self.to_phi * pre;
            let maps = [
                &self.grad * &w,
                &self.inv_r * &w,
                &self.grad * &p,
                &self.inv_r * &p,
                &self.h1_factor_t * &w,
                stack(&(&self.grad * &w * Complex64::from(c.a1)), &(&self.inv_r * &w * Complex64::from(c.b1))),
                stack(&(&self.grad * &p), &(&self.inv_r * &p * Complex64::from(c.k))),
            ];
            for m in maps.iter() {
                let v = top_right_singular_vector(m)?;
                out.push(pre * v);
            }
        }
        Ok(out)
    }
}

fn stack(a: &CMat, b: &CMat) -> CMat {
    let mut s = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
    s.rows_mut(0, a.nrows()).copy_from(a);
    s.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    s
}

/// Uniform `λ` grid over the critical-layer range `[1/R², 1]` widened by 10%
/// of its length on each side.
pub fn default_lambda_grid(aspect: f64, steps: usize) -> Vec<f64> {
    let lo = 1.0 / (aspect * aspect);
    let delta = 0.1 * (1.0 - lo);
    let (a, b) = (lo - delta, 1.0 + delta);
    let steps = steps.max(2);
    (0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect()
}

/// Worst ratio of each inequality over `λ_grid` and the candidate forcings,
/// for a single parameter point.
pub fn worst_ratios(params: &FlowParams, k: i64, grid: &RadialGrid, lambda_grid: &[f64], forcings: &[CVec], extremal: bool) -> Result<ResolventPoint> {
    if k == 0 {
        return Err(precondition("resolvent estimates need k != 0"));
    }
    if params.b == 0.0 {
        return Err(domain("resolvent scaling needs B != 0"));
    }
    let op = assemble_lnu(params, k, grid)?;
    let coeffs = Coefficients::new(params, k);
    let h1_inv = grid
        .h1r_gram()
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("H_r^1 factor is singular".into()))?;
    let f_iso: Vec<CVec> = forcings.iter().map(|f| op.to_iso(f)).collect();
    let mut point = ResolventPoint {
        nu: params.nu,
        worst: [0.0; 4],
        worst_lambda: [f64::NAN; 4],
    };
    for &lambda in lambda_grid {
        let maps = RatioMaps::new(&op, grid, coeffs, lambda)?;
        let mut candidates: Vec<CVec> = f_iso.clone();
        if extremal {
            candidates.extend(maps.extremal_forcings()?);
        }
        for f in &candidates {
            if vnorm(f) == 0.0 {
                continue;
            }
            let s = maps.sample(f, &h1_inv);
            for i in 0..4 {
                if s.ratios[i] > point.worst[i] {
                    point.worst[i] = s.ratios[i];
                    point.worst_lambda[i] = lambda;
                }
            }
        }
    }
    Ok(point)
}

/// One resolvent sample for a nodal forcing profile.
pub fn resolvent_sample(params: &FlowParams, k: i64, grid: &RadialGrid, lambda: f64, f: &CVec) -> Result<ResolventSample> {
    let op = assemble_lnu(params, k, grid)?;
    let maps = RatioMaps::new(&op, grid, Coefficients::new(params, k), lambda)?;
    let h1_inv = grid
        .h1r_gram()
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("H_r^1 factor is singular".into()))?;
    Ok(maps.sample(&op.to_iso(f), &h1_inv))
}

/// Worst-case ratios across a viscosity sweep and their log-log slopes.
pub fn verify_resolvent_estimates(
    params_sweep: &[FlowParams],
    k: i64,
    n: usize,
    lambda_grid: Option<&[f64]>,
    trials: usize,
    seed: u64,
) -> Result<ResolventReport> {
    if params_sweep.is_empty() {
        return Err(domain("empty parameter sweep"));
    }
    let points = params_sweep
        .iter()
        .map(|p| {
            let grid = RadialGrid::build(p.aspect, n)?;
            let lambdas = lambda_grid.map(|l| l.to_vec()).unwrap_or_else(|| default_lambda_grid(p.aspect, 41));
            let mut sampler = DirichletSampler::new(seed);
            let forcings: Vec<CVec> = (0..trials).map(|_| sampler.profile(&grid)).collect();
            worst_ratios(p, k, &grid, &lambdas, &forcings, true)
        })
        .collect::<Result<Vec<_>>>()?;
    let fits = (0..4)
        .map(|i| {
            let data: Vec<(f64, f64)> = points.iter().map(|p| (p.nu, p.worst[i])).collect();
            fit_power_law(&data)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolventReport { k, points, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nu: f64) -> FlowParams {
        FlowParams::new(nu, 0.0, 1.0, 2.0, 8).unwrap()
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let f = ModeField::zeros(1, 32, Rep::Weighted);
        let (w, p) = solve_resolvent(&params(1e-3), 1, 0.5, &f, &g).unwrap();
        assert_eq!(g.linf(&w.values), 0.0);
        assert_eq!(g.linf(&p.values), 0.0);
    }

    #[test]
    fn manufactured_recovery() {
        let g = RadialGrid::build(2.0, 64).unwrap();
        let p = params(1e-2);
        let (k, lambda) = (2i64, 0.6);
        let pi = std::f64::consts::PI;
        let w = |r: f64| (pi * (r - 1.0)).sin() * r;
        let w2 = |r: f64| -pi * pi * (pi * (r - 1.0)).sin() * r + 2.0 * pi * (pi * (r - 1.0)).cos();
        let c = (k * k) as f64 - 0.25;
        let f = g.sample_complex(|r| Complex64::new(-p.nu * (w2(r) - c * w(r) / (r * r)), k as f64 * p.b * (1.0 / (r * r) - lambda) * w(r)));
        let (omega, _) = solve_resolvent(&p, k, lambda, &ModeField::new(k, f, Rep::Weighted), &g).unwrap();
        assert!(g.linf(&(omega.values - g.sample(w))) < 1e-9);
    }

    #[test]
    fn linear_in_forcing() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let op = assemble_lnu(&params(1e-3), 1, &g).unwrap();
        let mut s = DirichletSampler::new(9);
        let (a, b) = (s.profile(&g), s.profile(&g));
        let al = Complex64::new(0.7, 0.2);
        let (wa, _) = solve_with(&op, 0.4, &a).unwrap();
        let (wb, _) = solve_with(&op, 0.4, &b).unwrap();
        let (wc, _) = solve_with(&op, 0.4, &(a.map(|z| z * al) + &b)).unwrap();
        let scale = g.linf(&wc).max(1.0);
        assert!(g.linf(&(wc - wa.map(|z| z * al) - wb)) < 1e-11 * scale);
    }

    #[test]
    fn empty_sweep_rejected() {
        assert!(verify_resolvent_estimates(&[], 1, 32, None, 4, 0).is_err());
    }

    #[test]
    fn critical_layer_dominates() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let p = params(1e-3);
        let mut s = DirichletSampler::new(4);
        let forcings: Vec<CVec> = (0..8).map(|_| s.profile(&g)).collect();
        let worst = worst_ratios(&p, 1, &g, &default_lambda_grid(2.0, 21), &forcings, true).unwrap();
        let far = worst_ratios(&p, 1, &g, &[2.0, 3.0], &forcings, false).unwrap();
        for i in 0..4 {
            assert!(far.worst[i] < worst.worst[i], "inequality {}", i + 1);
        }
    }

    #[test]
    fn trials_do_not_move_the_worst_case() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let p = params(1e-3);
        let lambdas = default_lambda_grid(2.0, 21);
        let run = |t: usize| {
            let mut s = DirichletSampler::new(1);
            let f: Vec<CVec> = (0..t).map(|_| s.profile(&g)).collect();
            worst_ratios(&p, 1, &g, &lambdas, &f, true).unwrap()
        };
        let (a, b) = (run(8), run(16));
        for i in 0..4 {
            assert!((a.worst[i] - b.worst[i]).abs() / b.worst[i] < 0.1);
        }
    }
}
