//! Mode-space evaluation of transport and buoyancy.
//!
//! Everything is computed on plain coefficients `f̂_k` and mapped back to the
//! stored representation at the end, so the rotation phases `e^{±iAt}` of
//! the buoyancy coupling come out of the change of variables directly.

use num_complex::Complex64;

use crate::field::{scale_by, ModeField, Rep};
use crate::grid::{CVec, RadialGrid};
use crate::operators::FlowParams;

use super::state::SimState;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Plain coefficients of `ω`, `ρ`, `φ` and their radial derivatives.
#[derive(Debug, Clone)]
pub struct HatFields {
    pub k_max: usize,
    pub omega: Vec<CVec>,
    pub rho: Vec<CVec>,
    pub phi: Vec<CVec>,
    pub d_omega: Vec<CVec>,
    pub d_rho: Vec<CVec>,
    pub d_phi: Vec<CVec>,
}

impl HatFields {
    pub fn of(state: &SimState, grid: &RadialGrid, a: f64) -> Self {
        let omega = SimState::hat(&state.omega, grid, a, state.t);
        let rho = SimState::hat(&state.rho, grid, a, state.t);
        let phi = SimState::hat(&state.phi, grid, a, state.t);
        let d = |v: &[CVec]| v.iter().map(|f| grid.differentiate(f)).collect::<Vec<_>>();
        Self {
            k_max: state.k_max,
            d_omega: d(&omega),
            d_rho: d(&rho),
            d_phi: d(&phi),
            omega,
            rho,
            phi,
        }
    }

    /// `max_r Σ_k (|∂_r φ̂_k| + |k φ̂_k / r|)`, a bound on the perturbation speed.
    pub fn velocity_bound(&self, grid: &RadialGrid) -> f64 {
        let r = grid.nodes();
        (0..r.len())
            .map(|i| {
                self.phi
                    .iter()
                    .zip(&self.d_phi)
                    .enumerate()
                    .map(|(idx, (p, dp))| {
                        let k = idx as f64 - self.k_max as f64;
                        dp[i].norm() + (k * p[i] / r[i]).norm()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// `(1/r) Σ_l [i(k-l) ∂_rφ̂_l f̂_{k-l} - i l φ̂_l ∂_r f̂_{k-l}]`, the mode-`k`
/// coefficient of `(1/r)(∂_rφ ∂_θf - ∂_θφ ∂_r f)`, truncated to `|l|, |k-l| ≤ K`.
pub fn transport_hat(phi: &[CVec], d_phi: &[CVec], f: &[CVec], d_f: &[CVec], k: i64, grid: &RadialGrid) -> CVec {
    let k_max = (phi.len() / 2) as i64;
    let r = grid.nodes();
    let n = r.len();
    let mut out = CVec::zeros(n);
    for l in -k_max..=k_max {
        let m = k - l;
        if m.abs() > k_max {
            continue;
        }
        let (li, mi) = ((l + k_max) as usize, (m + k_max) as usize);
        let a = I * m as f64;
        let b = I * l as f64;
        for i in 0..n {
            out[i] += a * d_phi[li][i] * f[mi][i] - b * phi[li][i] * d_f[mi][i];
        }
    }
    for i in 0..n {
        out[i] /= r[i];
    }
    out
}

/// Mode-`k` coefficient of `cos θ ∂_rρ - (sin θ / r) ∂_θρ`:
/// `∂_r(ρ̂_{k-1} + ρ̂_{k+1})/2 + ((k+1)ρ̂_{k+1} - (k-1)ρ̂_{k-1})/(2r)`.
pub fn buoyancy_hat(rho: &[CVec], d_rho: &[CVec], k: i64, grid: &RadialGrid) -> CVec {
    let k_max = (rho.len() / 2) as i64;
    let r = grid.nodes();
    let mut out = CVec::zeros(r.len());
    for (nb, coef) in [(k - 1, -(k - 1) as f64), (k + 1, (k + 1) as f64)] {
        if nb.abs() > k_max {
            continue;
        }
        let idx = (nb + k_max) as usize;
        for i in 0..r.len() {
            out[i] += 0.5 * d_rho[idx][i] + coef * rho[idx][i] / (2.0 * r[i]);
        }
    }
    out
}

/// Converts a plain mode-`k` coefficient to the stored representation.
fn store(k: i64, hat: CVec, grid: &RadialGrid, a: f64, t: f64) -> ModeField {
    if k == 0 {
        ModeField::new(0, hat, Rep::Hat)
    } else {
        let v = scale_by(&hat, grid, 0.5, Complex64::from_polar(1.0, k as f64 * a * t));
        ModeField::new(k, v, Rep::Weighted)
    }
}

fn hat_with_derivative(fields: &[ModeField], grid: &RadialGrid, a: f64, t: f64) -> (Vec<CVec>, Vec<CVec>) {
    let h = SimState::hat(fields, grid, a, t);
    let d = h.iter().map(|f| grid.differentiate(f)).collect();
    (h, d)
}

/// Buoyancy forcing of mode `k` in its stored representation, scaled by
/// `g_scale`. Neighbors outside the truncation count as zero.
pub fn buoyancy_rhs(rho: &[ModeField], k: i64, t: f64, params: &FlowParams, grid: &RadialGrid) -> ModeField {
    let (h, d) = hat_with_derivative(rho, grid, params.a, t);
    let b = buoyancy_hat(&h, &d, k, grid) * Complex64::new(params.g_scale, 0.0);
    store(k, b, grid, params.a, t)
}

/// Transport term of the vorticity equation for mode `k`, in its stored
/// representation (left-hand-side sign).
pub fn vorticity_nonlinear(omega: &[ModeField], phi: &[ModeField], k: i64, t: f64, a: f64, grid: &RadialGrid) -> ModeField {
    let (w, dw) = hat_with_derivative(omega, grid, a, t);
    let (p, dp) = hat_with_derivative(phi, grid, a, t);
    store(k, transport_hat(&p, &dp, &w, &dw, k, grid), grid, a, t)
}

/// Transport term of the temperature equation for mode `k`.
pub fn temperature_nonlinear(rho: &[ModeField], phi: &[ModeField], k: i64, t: f64, a: f64, grid: &RadialGrid) -> ModeField {
    vorticity_nonlinear(rho, phi, k, t, a, grid)
}

/// `f₁ = Σ_l ∂_r(r^{-1/2}φ_l) f_{k-l}` on weighted profiles (zero mode as
/// `r^{1/2}f_=`).
pub fn f1(phi_w: &[CVec], f_w: &[CVec], k: i64, grid: &RadialGrid) -> CVec {
    let k_max = (phi_w.len() / 2) as i64;
    let n = grid.n();
    let mut out = CVec::zeros(n);
    for l in -k_max..=k_max {
        let m = k - l;
        if m.abs() > k_max {
            continue;
        }
        let p = scale_by(&phi_w[(l + k_max) as usize], grid, -0.5, Complex64::new(1.0, 0.0));
        let dp = grid.differentiate(&p);
        let f = &f_w[(m + k_max) as usize];
        for i in 0..n {
            out[i] += dp[i] * f[i];
        }
    }
    out
}

/// `f₂ = Σ_l i l r^{-3/2} φ_l f_{k-l}` on weighted profiles.
pub fn f2(phi_w: &[CVec], f_w: &[CVec], k: i64, grid: &RadialGrid) -> CVec {
    let k_max = (phi_w.len() / 2) as i64;
    let r = grid.nodes();
    let mut out = CVec::zeros(r.len());
    for l in -k_max..=k_max {
        let m = k - l;
        if m.abs() > k_max || l == 0 {
            continue;
        }
        let p = &phi_w[(l + k_max) as usize];
        let f = &f_w[(m + k_max) as usize];
        for i in 0..r.len() {
            out[i] += I * l as f64 * r[i].powf(-1.5) * p[i] * f[i];
        }
    }
    out
}

/// The temperature analogues `g₁`, `g₂` are the same sums with `ρ`.
pub fn g1(phi_w: &[CVec], rho_w: &[CVec], k: i64, grid: &RadialGrid) -> CVec {
    f1(phi_w, rho_w, k, grid)
}

pub fn g2(phi_w: &[CVec], rho_w: &[CVec], k: i64, grid: &RadialGrid) -> CVec {
    f2(phi_w, rho_w, k, grid)
}

/// `(1/r)[ik f₁ - r^{1/2} ∂_r(r^{1/2} f₂)]`, the weighted transport term
/// assembled from the two sums.
pub fn combine_f1_f2(f1: &CVec, f2: &CVec, k: i64, grid: &RadialGrid) -> CVec {
    let r = grid.nodes();
    let d = grid.differentiate(&scale_by(f2, grid, 0.5, Complex64::new(1.0, 0.0)));
    CVec::from_fn(r.len(), |i, _| (I * k as f64 * f1[i] - r[i].sqrt() * d[i]) / r[i])
}

/// Plain-variable forcings of the zero modes `(ω_=, ρ_=)`: buoyancy from
/// `ρ̂_{±1}` minus the θ-averaged transport.
pub fn zero_mode_rhs(state: &SimState, params: &FlowParams, grid: &RadialGrid) -> (CVec, CVec) {
    let h = HatFields::of(state, grid, params.a);
    zero_mode_from_hat(&h, params, grid)
}

pub(crate) fn zero_mode_from_hat(h: &HatFields, params: &FlowParams, grid: &RadialGrid) -> (CVec, CVec) {
    let b = buoyancy_hat(&h.rho, &h.d_rho, 0, grid) * Complex64::new(params.g_scale, 0.0);
    let nw = transport_hat(&h.phi, &h.d_phi, &h.omega, &h.d_omega, 0, grid);
    let nr = transport_hat(&h.phi, &h.d_phi, &h.rho, &h.d_rho, 0, grid);
    (b - nw, -nr)
}

/// Which explicit terms enter a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TermSwitches {
    pub transport: bool,
    pub buoyancy: bool,
}

impl Default for TermSwitches {
    fn default() -> Self {
        Self {
            transport: true,
            buoyancy: true,
        }
    }
}

/// Explicit right-hand sides of every mode in stored representation, plus
/// the velocity bound used for the step restriction.
pub struct ExplicitRhs {
    pub omega: Vec<CVec>,
    pub rho: Vec<CVec>,
    pub velocity: f64,
}

pub fn explicit_rhs(state: &SimState, params: &FlowParams, grid: &RadialGrid, switches: TermSwitches) -> ExplicitRhs {
    let h = HatFields::of(state, grid, params.a);
    let n = grid.n();
    let mut omega = Vec::with_capacity(2 * state.k_max + 1);
    let mut rho = Vec::with_capacity(2 * state.k_max + 1);
    for k in state.modes() {
        let mut fw = CVec::zeros(n);
        let mut fr = CVec::zeros(n);
        if switches.buoyancy {
            fw += buoyancy_hat(&h.rho, &h.d_rho, k, grid) * Complex64::new(params.g_scale, 0.0);
        }
        if switches.transport {
            fw -= transport_hat(&h.phi, &h.d_phi, &h.omega, &h.d_omega, k, grid);
            fr -= transport_hat(&h.phi, &h.d_phi, &h.rho, &h.d_rho, k, grid);
        }
        omega.push(store(k, fw, grid, params.a, state.t).values);
        rho.push(store(k, fr, grid, params.a, state.t).values);
    }
    let velocity = if switches.transport { h.velocity_bound(grid) } else { 0.0 };
    ExplicitRhs { omega, rho, velocity }
}
