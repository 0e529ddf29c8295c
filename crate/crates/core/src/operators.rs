//! Per-mode linear operators in weak (Galerkin) form on the Dirichlet space.
//!
//! For `k ≠ 0` the unknowns are the weighted variables and the operator is
//! `𝓛 = -ν(∂_r² - (k²-¼)/r²) + ikB/r²`. The zero mode uses the radial
//! Laplacian `∂_r² + r^{-1}∂_r`, whose natural inner product carries the
//! weight `r`.
//!
//! Internally a Dirichlet profile `f` is stored through its isometric
//! coordinates `u_j = (μ_j)^{1/2} f(r_j)` on the interior nodes, where `μ_j` is
//! the quadrature weight (times `r_j` for the zero mode). In these
//! coordinates the discrete inner product is Euclidean, the stiffness matrix
//! is `GᵀG` and `Re uᴴ Â u` equals the energy form exactly.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, precondition, Error, Result};
use crate::field::{ModeField, Rep};
use crate::grid::{CMat, CVec, RadialGrid};

fn default_g_scale() -> f64 {
    1.0
}

/// Physical and truncation parameters. Viscosity and thermal diffusivity are
/// equal and both given by `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub nu: f64,
    /// Rigid-rotation coefficient.
    #[serde(default)]
    pub a: f64,
    /// Potential-flow coefficient.
    pub b: f64,
    /// Aspect ratio `R`.
    pub aspect: f64,
    /// Multiplier on the buoyancy forcing.
    #[serde(default = "default_g_scale")]
    pub g_scale: f64,
    /// Azimuthal truncation `K`.
    pub k_max: usize,
}

impl FlowParams {
    pub fn new(nu: f64, a: f64, b: f64, aspect: f64, k_max: usize) -> Result<Self> {
        let p = Self {
            nu,
            a,
            b,
            aspect,
            g_scale: 1.0,
            k_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(domain(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.aspect > 1.0) || !self.aspect.is_finite() {
            return Err(domain(format!("aspect ratio must exceed 1, got {}", self.aspect)));
        }
        if self.k_max < 1 {
            return Err(domain("truncation K must be at least 1"));
        }
        if !self.a.is_finite() || !self.b.is_finite() || !self.g_scale.is_finite() {
            return Err(domain("A, B and g_scale must be finite"));
        }
        Ok(())
    }

    /// `(νk²)^{1/3} |B|^{2/3} R^{-2}`.
    pub fn enhanced_rate(&self, k: i64) -> f64 {
        let k2 = (k * k) as f64;
        (self.nu * k2).cbrt() * self.b.abs().powf(2.0 / 3.0) / (self.aspect * self.aspect)
    }
}

/// Assembled operators for one mode, immutable once built.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub k: i64,
    nu: f64,
    b: f64,
    /// `k² - 1/4`, zero for the axisymmetric mode.
    shift: f64,
    interior_r: Vec<f64>,
    sqrt_metric: Vec<f64>,
    /// `G`, with `‖f'‖ = ‖G u‖` for isometric coordinates `u`.
    grad: DMatrix<f64>,
    /// Symmetric stiffness `GᵀG`.
    stiffness: DMatrix<f64>,
    l_iso: CMat,
    delta_iso: DMatrix<f64>,
    neg_delta: Cholesky<f64, Dyn>,
    /// Maps full nodal values to the weak `-∂_r²` (or `-r^{-1}∂_r(r∂_r)`) on
    /// interior nodes, so it also acts on profiles that do not vanish at the walls.
    strong: DMatrix<f64>,
}

/// Assembles `𝓛` and `Δ_k = ∂_r² - (k²-¼)/r²` for `k ≠ 0`.
pub fn assemble_lnu(params: &FlowParams, k: i64, grid: &RadialGrid) -> Result<OperatorBundle> {
    params.validate()?;
    if k == 0 {
        return Err(precondition("k = 0 uses assemble_zero_mode"));
    }
    let shift = (k * k) as f64 - 0.25;
    build(params, k, grid, shift, false)
}

/// Assembles the axisymmetric diffusion `ν(∂_r² + r^{-1}∂_r)` and its elliptic
/// counterpart, both with Dirichlet walls.
pub fn assemble_zero_mode(params: &FlowParams, grid: &RadialGrid) -> Result<OperatorBundle> {
    params.validate()?;
    build(params, 0, grid, 0.0, true)
}

/// Assembles the operator matching the sign of `k`.
pub fn assemble(params: &FlowParams, k: i64, grid: &RadialGrid) -> Result<OperatorBundle> {
    if k == 0 {
        assemble_zero_mode(params, grid)
    } else {
        assemble_lnu(params, k, grid)
    }
}

fn build(params: &FlowParams, k: i64, grid: &RadialGrid, shift: f64, radial_weight: bool) -> Result<OperatorBundle> {
    let n = grid.n();
    let m = grid.interior();
    let r = grid.nodes();
    let w = grid.weights();
    let mu: Vec<f64> = (0..n).map(|i| if radial_weight { w[i] * r[i] } else { w[i] }).collect();
    let interior_r: Vec<f64> = r[1..n - 1].to_vec();
    let sqrt_metric: Vec<f64> = mu[1..n - 1].iter().map(|x| x.sqrt()).collect();
    let d = grid.deriv();

    let g = DMatrix::from_fn(n, m, |i, j| mu[i].sqrt() * d[(i, j + 1)] / sqrt_metric[j]);
    let stiffness = g.transpose() * &g;
    let mut delta_iso = -stiffness.clone();
    for j in 0..m {
        delta_iso[(j, j)] -= shift / (interior_r[j] * interior_r[j]);
    }
    let neg_delta = Cholesky::new(-delta_iso.clone()).ok_or_else(|| Error::Conditioning(format!("elliptic operator for k = {k} is not definite")))?;

    let skew = k as f64 * params.b;
    let l_iso = CMat::from_fn(m, m, |i, j| {
        let mut v = Complex64::new(-params.nu * delta_iso[(i, j)], 0.0);
        if i == j && !radial_weight {
            v += Complex64::new(0.0, skew / (interior_r[i] * interior_r[i]));
        }
        v
    });

    let strong = DMatrix::from_fn(m, n, |i, j| {
        let mut acc = 0.0;
        for q in 0..n {
            acc += d[(q, i + 1)] * mu[q] * d[(q, j)];
        }
        acc / mu[i + 1]
    });

    Ok(OperatorBundle {
        k,
        nu: params.nu,
        b: params.b,
        shift,
        interior_r,
        sqrt_metric,
        grad: g,
        stiffness,
        l_iso,
        delta_iso,
        neg_delta,
        strong,
    })
}

impl OperatorBundle {
    pub fn is_zero_mode(&self) -> bool {
        self.k == 0
    }

    /// Number of interior unknowns.
    pub fn dim(&self) -> usize {
        self.interior_r.len()
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `k² - 1/4` (zero for the axisymmetric mode).
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn interior_r(&self) -> &[f64] {
        &self.interior_r
    }

    /// The operator in isometric coordinates.
    pub fn l_iso(&self) -> &CMat {
        &self.l_iso
    }

    pub fn delta_iso(&self) -> &DMatrix<f64> {
        &self.delta_iso
    }

    pub fn grad(&self) -> &DMatrix<f64> {
        &self.grad
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    /// `Δ̂^{-1}` in isometric coordinates.
    pub fn delta_inverse(&self) -> DMatrix<f64> {
        -self.neg_delta.inverse()
    }

    /// Interior nodal values to isometric coordinates.
    pub fn to_iso(&self, f: &CVec) -> CVec {
        CVec::from_fn(self.dim(), |j, _| f[j + 1] * self.sqrt_metric[j])
    }

    /// Isometric coordinates back to nodal values with zero walls.
    pub fn from_iso(&self, u: &CVec) -> CVec {
        let m = self.dim();
        let mut f = CVec::zeros(m + 2);
        for j in 0..m {
            f[j + 1] = u[j] / self.sqrt_metric[j];
        }
        f
    }

    /// Load vector of a nodal right-hand side sampled at the interior nodes.
    pub fn load(&self, q: &CVec) -> CVec {
        self.to_iso(q)
    }

    fn strong_apply(&self, f: &CVec) -> CVec {
        let m = self.dim();
        CVec::from_fn(m, |i, _| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in f.iter().enumerate() {
                acc += v * self.strong[(i, j)];
            }
            acc
        })
    }

    /// Nodal values of `𝓛 f` on the interior (walls set to 0).
    pub fn apply_l(&self, f: &CVec) -> Result<CVec> {
        check_len(self.dim() + 2, f.len())?;
        let s = self.strong_apply(f);
        let mut out = CVec::zeros(f.len());
        for j in 0..self.dim() {
            let r2 = self.interior_r[j] * self.interior_r[j];
            let mut v = s[j] * self.nu + f[j + 1] * (self.nu * self.shift / r2);
            if self.k != 0 {
                v += f[j + 1] * Complex64::new(0.0, self.k as f64 * self.b / r2);
            }
            out[j + 1] = v;
        }
        Ok(out)
    }

    /// Nodal values of `Δ_k f` on the interior (walls set to 0).
    pub fn apply_delta(&self, f: &CVec) -> Result<CVec> {
        check_len(self.dim() + 2, f.len())?;
        let s = self.strong_apply(f);
        let mut out = CVec::zeros(f.len());
        for j in 0..self.dim() {
            let r2 = self.interior_r[j] * self.interior_r[j];
            out[j + 1] = -s[j] - f[j + 1] * (self.shift / r2);
        }
        Ok(out)
    }

    /// Solves `Δ_k φ = q` with `φ(1) = φ(R) = 0`; wall values of `q` are ignored.
    pub fn solve_delta(&self, q: &CVec) -> Result<CVec> {
        check_len(self.dim() + 2, q.len())?;
        let rhs = self.to_iso(q);
        let re = self.neg_delta.solve(&rhs.map(|z| -z.re));
        let im = self.neg_delta.solve(&rhs.map(|z| -z.im));
        let u = CVec::from_fn(self.dim(), |j, _| Complex64::new(re[j], im[j]));
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Conditioning(format!("stream solve for k = {} diverged", self.k)));
        }
        Ok(self.from_iso(&u))
    }
}

/// Recovers the stream function of a vorticity profile. Nonzero modes take
/// weighted profiles, the axisymmetric mode takes the plain one.
pub fn solve_stream(omega: &ModeField, bundle: &OperatorBundle) -> Result<ModeField> {
    if omega.k != bundle.k {
        return Err(precondition(format!("field has k = {}, operator has k = {}", omega.k, bundle.k)));
    }
    let want = if bundle.k == 0 { Rep::Hat } else { Rep::Weighted };
    if omega.rep != want {
        return Err(precondition(format!("mode {} expects {:?} representation", bundle.k, want)));
    }
    Ok(ModeField::new(omega.k, bundle.solve_delta(&omega.values)?, omega.rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::random::DirichletSampler;

    fn params(nu: f64, b: f64, aspect: f64) -> FlowParams {
        FlowParams::new(nu, 0.0, b, aspect, 8).unwrap()
    }

    #[test]
    fn rejects_zero_mode_and_bad_params() {
        let g = RadialGrid::build(2.0, 16).unwrap();
        assert!(matches!(assemble_lnu(&params(1e-2, 1.0, 2.0), 0, &g), Err(Error::Precondition(_))));
        assert!(FlowParams::new(0.0, 0.0, 1.0, 2.0, 4).is_err());
        assert!(FlowParams::new(1e-3, 0.0, 1.0, 1.0, 4).is_err());
        assert!(FlowParams::new(1e-3, 0.0, 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn self_adjoint_without_shear() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let op = assemble_lnu(&params(1e-2, 0.0, 2.0), 1, &g).unwrap();
        let l = op.l_iso();
        assert!(norm2(&(l - l.adjoint())) < 1e-10 * norm2(l));
        let sym = l.map(|z| z.re);
        let eig = sym.symmetric_eigenvalues();
        assert!(eig.min() > 0.0);
    }

    #[test]
    fn energy_identity_and_skew_part() {
        let g = RadialGrid::build(2.0, 64).unwrap();
        let p = params(1e-2, 1.0, 2.0);
        let op = assemble_lnu(&p, 1, &g).unwrap();
        let mut s = DirichletSampler::new(11);
        for _ in 0..50 {
            let f = s.profile(&g);
            let lf = op.apply_l(&f).unwrap();
            let q = g.inner_product(&lf, &f).unwrap();
            let df = g.differentiate(&f);
            let energy = p.nu * (g.l2(&df).powi(2) + 0.75 * g.l2_over_r(&f).powi(2));
            let h1 = g.h1r(&f).powi(2);
            assert!((q.re - energy).abs() < 1e-10 * h1.max(1.0));
            let skew = p.b * g.l2_rpow(&f, -1.0).powi(2);
            assert!((q.im - skew).abs() < 1e-10 * h1.max(1.0));
        }
    }

    #[test]
    fn zero_mode_examples() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let op = assemble_zero_mode(&params(1.0, 1.0, 2.0), &g).unwrap();
        let lap_log = op.apply_delta(&g.sample(f64::ln)).unwrap();
        assert!(g.linf(&lap_log) < 1e-8);
        let lap_sq = op.apply_delta(&g.sample(|r| r * r)).unwrap();
        for j in 1..47 {
            assert!((lap_sq[j].re - 4.0).abs() < 1e-9, "{}", lap_sq[j]);
        }
        let zero = op.apply_delta(&CVec::zeros(48)).unwrap();
        assert_eq!(g.linf(&zero), 0.0);
    }

    fn manufactured(aspect: f64, k: i64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
        let c = (k * k) as f64 - 0.25;
        let phi = move |r: f64| (r - 1.0) * (aspect - r);
        let omega = move |r: f64| -2.0 - c * (r - 1.0) * (aspect - r) / (r * r);
        (phi, omega)
    }

    #[test]
    fn stream_solve_manufactured() {
        let g = RadialGrid::build(2.0, 48).unwrap();
        let op = assemble_lnu(&params(1e-2, 1.0, 2.0), 2, &g).unwrap();
        let (phi, omega) = manufactured(2.0, 2);
        let w = ModeField::new(2, g.sample(omega), Rep::Weighted);
        let sol = solve_stream(&w, &op).unwrap();
        let exact = g.sample(phi);
        assert!(g.linf(&(&sol.values - &exact)) < 1e-9);
        let resid = &op.apply_delta(&sol.values).unwrap() - &w.values;
        let interior: f64 = (1..47).map(|j| resid[j].norm()).fold(0.0, f64::max);
        assert!(interior < 1e-10 * g.linf(&w.values));
    }

    #[test]
    fn stream_solve_zero_and_linear() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let op = assemble_lnu(&params(1e-2, 1.0, 2.0), 3, &g).unwrap();
        let zero = solve_stream(&ModeField::zeros(3, 32, Rep::Weighted), &op).unwrap();
        assert_eq!(g.linf(&zero.values), 0.0);
        let mut s = DirichletSampler::new(5);
        let (a, b) = (s.profile(&g), s.profile(&g));
        let (al, be) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        let combo = a.map(|z| z * al) + b.map(|z| z * be);
        let lhs = op.solve_delta(&combo).unwrap();
        let rhs = op.solve_delta(&a).unwrap().map(|z| z * al) + op.solve_delta(&b).unwrap().map(|z| z * be);
        assert!(g.linf(&(lhs - rhs)) < 1e-11);
        let wrong = ModeField::zeros(3, 32, Rep::Hat);
        assert!(solve_stream(&wrong, &op).is_err());
    }

    #[test]
    fn stream_solve_spectral_convergence() {
        let aspect = 2.0;
        let pole: f64 = 0.9;
        let c = 4.0 - 0.25;
        let shape = move |r: f64| 1.0 / (r - pole);
        let lin = move |r: f64| shape(1.0) + (shape(aspect) - shape(1.0)) * (r - 1.0) / (aspect - 1.0);
        let phi = move |r: f64| shape(r) - lin(r);
        let omega = move |r: f64| 2.0 / (r - pole).powi(3) - c * phi(r) / (r * r);
        let err = |n: usize| {
            let g = RadialGrid::build(aspect, n).unwrap();
            let op = assemble_lnu(&params(1e-2, 1.0, aspect), 2, &g).unwrap();
            let sol = op.solve_delta(&g.sample(omega)).unwrap();
            g.linf(&(sol - g.sample(phi)))
        };
        let (e24, e48) = (err(24), err(48));
        assert!(e48 < 1e-4 * e24, "{e24:e} -> {e48:e}");
    }
}
