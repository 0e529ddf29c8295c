//! Spectral gap `Ψ = inf_λ σ_min(𝓛 - iλ)`, accretivity checks and the
//! semigroup bound `‖e^{-t𝓛}‖ ≤ e^{-tΨ + π/2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};
use crate::grid::{CMat, CVec, RadialGrid};
use crate::linalg::{expm, norm2, sigma_min};
use crate::operators::{assemble_lnu, FlowParams, OperatorBundle};
use crate::random::DirichletSampler;

pub const MIN_LAMBDA_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGapResult {
    pub psi: f64,
    pub argmin_lambda: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
    /// False when the sampled interval misses part of `[kB/R², kB]`.
    pub covers_skew_range: bool,
    /// `(λ, σ_min)` at the grid points.
    pub samples: Vec<(f64, f64)>,
}

/// The skew spectrum range `[min, max]` of `kB/r²` over `r ∈ [1, R]`.
pub fn skew_range(params: &FlowParams, k: i64) -> (f64, f64) {
    let kb = k as f64 * params.b;
    let inner = kb / (params.aspect * params.aspect);
    (inner.min(kb), inner.max(kb))
}

/// Skew range widened by 20% of its width, never narrower than `0.2(1 + |kB|)`.
pub fn default_lambda_range(params: &FlowParams, k: i64) -> (f64, f64) {
    let (lo, hi) = skew_range(params, k);
    let pad = (0.2 * (hi - lo)).max(0.1 * (1.0 + (k as f64 * params.b).abs()));
    (lo - pad, hi + pad)
}

fn sigma_at(l: &CMat, lambda: f64) -> f64 {
    let mut a = l.clone();
    for j in 0..a.nrows() {
        a[(j, j)] -= Complex64::new(0.0, lambda);
    }
    sigma_min(&a)
}

/// Grid minimum of `σ_min(𝓛 - iλ)` refined by golden-section search.
pub fn spectral_gap(params: &FlowParams, k: i64, grid: &RadialGrid, lambda_range: Option<(f64, f64)>, steps: usize) -> Result<SpectralGapResult> {
    let op = assemble_lnu(params, k, grid)?;
    spectral_gap_of(&op, params, lambda_range, steps)
}

pub fn spectral_gap_of(op: &OperatorBundle, params: &FlowParams, lambda_range: Option<(f64, f64)>, steps: usize) -> Result<SpectralGapResult> {
    if steps < MIN_LAMBDA_STEPS {
        return Err(domain(format!("need at least {MIN_LAMBDA_STEPS} lambda steps, got {steps}")));
    }
    let (a, b) = lambda_range.unwrap_or_else(|| default_lambda_range(params, op.k));
    if !(b > a) {
        return Err(domain(format!("empty lambda range [{a}, {b}]")));
    }
    let (slo, shi) = skew_range(params, op.k);
    let covers = a <= slo && b >= shi;
    let l = op.l_iso();
    let h = (b - a) / (steps - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..steps)
        .map(|i| {
            let lam = a + h * i as f64;
            (lam, sigma_at(l, lam))
        })
        .collect();
    let (imin, &(lam0, s0)) = samples
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .expect("at least one sample");
    let lo = samples[imin.saturating_sub(1)].0;
    let hi = samples[(imin + 1).min(steps - 1)].0;
    let (lam1, s1) = golden_min(|x| sigma_at(l, x), lo, hi, 1e-10 * (1.0 + lam0.abs()));
    let (psi, argmin) = if s1 < s0 { (s1, lam1) } else { (s0, lam0) };
    Ok(SpectralGapResult {
        psi,
        argmin_lambda: argmin,
        lambda_min: a,
        lambda_max: b,
        steps,
        covers_skew_range: covers,
        samples,
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventBoundCheck {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub norm: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccretivityReport {
    pub k: i64,
    /// `min Re⟨𝓛f, f⟩ / ‖f‖²` over the samples.
    pub min_normalized_real_part: f64,
    /// `max |Re⟨𝓛f, f⟩ - ν(‖f'‖² + (k²-¼)‖f/r‖²)| / ‖f‖²_{H_r^1}`.
    pub max_identity_defect: f64,
    pub resolvent_checks: Vec<ResolventBoundCheck>,
    /// Every check satisfies `‖(λ + 𝓛)^{-1}‖ ≤ (1 + 1e-8)/Re λ`.
    pub resolvent_ok: bool,
}

/// Normalized real part `Re⟨𝓛f, f⟩ / ‖f‖²` of one profile.
pub fn normalized_real_part(op: &OperatorBundle, grid: &RadialGrid, f: &CVec) -> Result<f64> {
    let lf = op.apply_l(f)?;
    Ok(grid.inner_product(&lf, f)?.re / grid.l2(f).powi(2))
}

pub fn check_accretivity(params: &FlowParams, k: i64, grid: &RadialGrid, trials: usize, seed: u64) -> Result<AccretivityReport> {
    if trials < 50 {
        return Err(precondition(format!("need at least 50 trials, got {trials}")));
    }
    let op = assemble_lnu(params, k, grid)?;
    let mut sampler = DirichletSampler::new(seed);
    let mut min_re = f64::INFINITY;
    let mut defect: f64 = 0.0;
    for _ in 0..trials {
        let f = sampler.profile(grid);
        let lf = op.apply_l(&f)?;
        let q = grid.inner_product(&lf, &f)?.re;
        min_re = min_re.min(q / grid.l2(&f).powi(2));
        let df = grid.differentiate(&f);
        let energy = params.nu * (grid.l2(&df).powi(2) + op.shift() * grid.l2_over_r(&f).powi(2));
        defect = defect.max((q - energy).abs() / grid.h1r(&f).powi(2));
    }
    let mut lambdas: Vec<Complex64> = [0.1, 1.0, 10.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for _ in 0..10 {
        let re = 10f64.powf(2.0 * sampler.real_gaussian().tanh());
        let im = 2.0 * sampler.real_gaussian();
        lambdas.push(Complex64::new(re, im));
    }
    let l = op.l_iso();
    let resolvent_checks: Vec<ResolventBoundCheck> = lambdas
        .iter()
        .map(|&lam| {
            let mut a = l.clone();
            for j in 0..a.nrows() {
                a[(j, j)] += lam;
            }
            ResolventBoundCheck {
                lambda_re: lam.re,
                lambda_im: lam.im,
                norm: 1.0 / sigma_min(&a),
                bound: 1.0 / lam.re,
            }
        })
        .collect();
    let resolvent_ok = resolvent_checks.iter().all(|c| c.norm <= c.bound * (1.0 + 1e-8));
    Ok(AccretivityReport {
        k,
        min_normalized_real_part: min_re,
        max_identity_defect: defect,
        resolvent_checks,
        resolvent_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupPoint {
    pub t: f64,
    pub norm: f64,
    pub bound: f64,
    /// `log(bound) - log(norm)`; nonnegative iff the bound holds.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupReport {
    pub psi: f64,
    pub points: Vec<SemigroupPoint>,
    pub min_margin: f64,
    /// Times dropped because `t‖𝓛‖` would overflow the propagator.
    pub clamped: Vec<f64>,
}

/// Largest `t‖𝓛‖` for which the propagator is formed.
pub const MAX_EXPONENT: f64 = 1e12;

/// Evaluates `‖e^{-t𝓛}‖` against `e^{-tΨ + π/2}` on `t_grid`.
pub fn semigroup_bound_check(params: &FlowParams, k: i64, grid: &RadialGrid, t_grid: &[f64], gap: &SpectralGapResult) -> Result<SemigroupReport> {
    let op = assemble_lnu(params, k, grid)?;
    let l = op.l_iso();
    let lnorm = norm2(l);
    let mut points = Vec::new();
    let mut clamped = Vec::new();
    for &t in t_grid {
        if t < 0.0 {
            return Err(domain(format!("negative time {t}")));
        }
        if t * lnorm > MAX_EXPONENT {
            clamped.push(t);
            continue;
        }
        let prop = expm(&(l * Complex64::new(-t, 0.0)));
        let norm = norm2(&prop);
        let log_bound = -t * gap.psi + std::f64::consts::FRAC_PI_2;
        points.push(SemigroupPoint {
            t,
            norm,
            bound: log_bound.exp(),
            margin: log_bound - norm.ln(),
        });
    }
    let min_margin = points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    Ok(SemigroupReport {
        psi: gap.psi,
        points,
        min_margin,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nu: f64, b: f64) -> FlowParams {
        FlowParams::new(nu, 0.0, b, 2.0, 8).unwrap()
    }

    fn smallest_eigenvalue(params: &FlowParams, k: i64, g: &RadialGrid) -> f64 {
        let op = assemble_lnu(params, k, g).unwrap();
        op.l_iso().map(|z| z.re).symmetric_eigenvalues().min()
    }

    #[test]
    fn self_adjoint_gap_is_lowest_eigenvalue() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let p = params(1e-2, 0.0);
        let gap = spectral_gap(&p, 1, &g, None, 64).unwrap();
        let mu = smallest_eigenvalue(&p, 1, &g);
        assert!((gap.psi - mu).abs() < 1e-8 * mu);
        assert!(gap.argmin_lambda.abs() < 1e-4);
    }

    #[test]
    fn gap_is_grid_minimum_and_nonnegative() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let gap = spectral_gap(&params(1e-3, 1.0), 1, &g, None, 64).unwrap();
        assert!(gap.psi >= 0.0);
        assert!(gap.covers_skew_range);
        assert!(gap.samples.iter().all(|&(_, s)| gap.psi <= s));
    }

    #[test]
    fn narrow_range_is_flagged() {
        let g = RadialGrid::build(2.0, 24).unwrap();
        let gap = spectral_gap(&params(1e-2, 1.0), 1, &g, Some((0.5, 0.6)), 64).unwrap();
        assert!(!gap.covers_skew_range);
        assert!(spectral_gap(&params(1e-2, 1.0), 1, &g, None, 10).is_err());
    }

    #[test]
    fn accretivity_examples() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let p = params(1e-3, 1.0);
        for k in 1..=8 {
            let rep = check_accretivity(&p, k, &g, 50, k as u64).unwrap();
            assert!(rep.min_normalized_real_part >= -1e-12);
            assert!(rep.max_identity_defect < 1e-10);
            assert!(rep.resolvent_ok, "{:?}", rep.resolvent_checks);
        }
        let op = assemble_lnu(&p, 3, &g).unwrap();
        let f = DirichletSampler::new(2).profile(&g);
        let a = normalized_real_part(&op, &g, &f).unwrap();
        let b = normalized_real_part(&op, &g, &f.map(|z| z * 2.0)).unwrap();
        assert!((a - b).abs() <= 1e-14 * a.abs());
    }

    #[test]
    fn semigroup_trivial_and_self_adjoint() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let p = params(1e-2, 0.0);
        let gap = spectral_gap(&p, 1, &g, None, 64).unwrap();
        let rep = semigroup_bound_check(&p, 1, &g, &[0.0, 1.0, 5.0], &gap).unwrap();
        assert!((rep.points[0].norm - 1.0).abs() < 1e-12);
        for pt in &rep.points {
            assert!((pt.norm - (-pt.t * gap.psi).exp()).abs() < 1e-9);
            assert!((pt.margin - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
        }
    }

    #[test]
    fn semigroup_bound_with_shear() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let p = params(1e-3, 1.0);
        let gap = spectral_gap(&p, 1, &g, None, 64).unwrap();
        let rep = semigroup_bound_check(&p, 1, &g, &[1.0, 5.0, 10.0, 50.0], &gap).unwrap();
        assert!(rep.min_margin >= 1.0, "{:?}", rep.points);
    }
}
