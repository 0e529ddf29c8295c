//! The energy functionals `E_k`, `H_k` and the initial energy `M_k(0)`.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::evolution::{LedgerSample, SpaceTimeLedger, WeightParams};
use crate::grid::RadialGrid;
use crate::operators::FlowParams;

use super::state::SimState;

/// Per-mode constituents. For `k ≠ 0`, `e` holds the sup term, the
/// enhanced-dissipation term, the stream (inviscid damping) term and the
/// viscous `ω/r` term; `h` the three temperature analogues. For `k = 0` each
/// holds a single plain sup-in-time norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEnergy {
    pub k: i64,
    pub e: Vec<f64>,
    pub h: Vec<f64>,
    pub e_total: f64,
    pub h_total: f64,
    pub m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub modes: Vec<ModeEnergy>,
    pub e_sum: f64,
    pub h_sum: f64,
    /// `ε₀ν^{1/2}|B|^{1/2}R^{-2}` and `ε₁ν^{7/6}|B|^{5/6}R^{-3}`.
    pub threshold_rhs: [f64; 2],
    pub snapshots: usize,
}

/// Thresholds on the right of the stability estimate.
pub fn threshold_rhs(params: &FlowParams, eps0: f64, eps1: f64) -> [f64; 2] {
    let (nu, b, r) = (params.nu, params.b.abs(), params.aspect);
    [
        eps0 * nu.sqrt() * b.sqrt() * r.powi(-2),
        eps1 * nu.powf(7.0 / 6.0) * b.powf(5.0 / 6.0) * r.powi(-3),
    ]
}

/// `M_k(0)` of a stored mode profile.
pub fn initial_energy(grid: &RadialGrid, k: i64, omega: &crate::grid::CVec) -> f64 {
    if k == 0 {
        return grid.l2(omega);
    }
    let r = grid.aspect();
    grid.l2(omega) + r.powi(-2) * r.ln().powf(-1.5) * grid.l2_rpow(omega, 2.0) + r.powi(3) * grid.l2_rpow(omega, -3.0) + r * grid.l2(&grid.differentiate(omega))
}

/// Running accumulation of the energy functionals over a trajectory.
#[derive(Debug, Clone)]
pub struct EnergyAccumulator {
    params: FlowParams,
    weight: WeightParams,
    k_max: usize,
    omega: Vec<SpaceTimeLedger>,
    rho: Vec<SpaceTimeLedger>,
    first: Vec<(LedgerSample, LedgerSample)>,
    zero_sup: (f64, f64),
    m0: Vec<f64>,
    single_dt: f64,
    count: usize,
}

impl EnergyAccumulator {
    pub fn new(params: &FlowParams, weight: WeightParams) -> Self {
        let k = params.k_max as i64;
        let ledgers: Vec<SpaceTimeLedger> = (-k..=k)
            .map(|k| SpaceTimeLedger::new(if k == 0 { 0.0 } else { weight.rate(params, k) }))
            .collect();
        Self {
            params: *params,
            weight,
            k_max: params.k_max,
            omega: ledgers.clone(),
            rho: ledgers,
            first: Vec::new(),
            zero_sup: (0.0, 0.0),
            m0: Vec::new(),
            single_dt: 0.0,
            count: 0,
        }
    }

    pub fn weight(&self) -> WeightParams {
        self.weight
    }

    pub fn snapshots(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, state: &SimState, grid: &RadialGrid) {
        let kz = self.k_max;
        for (i, ((w, r), p)) in state.omega.iter().zip(&state.rho).zip(&state.phi).enumerate() {
            if i == kz {
                self.zero_sup.0 = self.zero_sup.0.max(grid.l2(&w.values));
                self.zero_sup.1 = self.zero_sup.1.max(grid.l2(&r.values));
                continue;
            }
            let sw = LedgerSample::of(grid, state.t, &w.values, Some(&p.values));
            let sr = LedgerSample::of(grid, state.t, &r.values, None);
            self.omega[i].push(sw);
            self.rho[i].push(sr);
            if self.count == 0 {
                self.first.push((sw, sr));
            }
        }
        if self.count == 0 {
            self.m0 = state.omega.iter().map(|f| initial_energy(grid, f.k, &f.values)).collect();
            self.single_dt = state.dt;
        }
        self.count += 1;
    }

    /// With one snapshot the time integrals are taken as one step of width
    /// `dt` at that snapshot.
    fn integrated(&self, i: usize) -> (Cow<'_, SpaceTimeLedger>, Cow<'_, SpaceTimeLedger>) {
        if self.count != 1 {
            return (Cow::Borrowed(&self.omega[i]), Cow::Borrowed(&self.rho[i]));
        }
        let idx = if i < self.k_max { i } else { i - 1 };
        let (sw, sr) = self.first[idx];
        let make = |l: &SpaceTimeLedger, s: LedgerSample| {
            let mut l = l.clone();
            let w = (2.0 * l.rate * s.t).exp() * self.single_dt;
            l.l2_l2_sq = w * s.l2_sq;
            l.l2_l2_dr_sq = w * s.dr_sq;
            l.l2_l2_over_r_sq = w * s.over_r_sq;
            l.l2_l2_phi_dr_sq = w * s.phi_dr_sq;
            l.l2_l2_phi_over_r_sq = w * s.phi_over_r_sq;
            l.l2_linf_phi_sq = w * s.phi_linf_sq;
            l
        };
        (Cow::Owned(make(&self.omega[i], sw)), Cow::Owned(make(&self.rho[i], sr)))
    }

    pub fn mode_energies(&self) -> Vec<ModeEnergy> {
        let (nu, b, aspect) = (self.params.nu, self.params.b.abs(), self.params.aspect);
        (0..=2 * self.k_max)
            .map(|i| {
                let k = i as i64 - self.k_max as i64;
                let m0 = self.m0.get(i).copied().unwrap_or(0.0);
                if k == 0 {
                    let (e, h) = self.zero_sup;
                    return ModeEnergy {
                        k,
                        e: vec![e],
                        h: vec![h],
                        e_total: e,
                        h_total: h,
                        m0,
                    };
                }
                let kf = (k as f64).abs();
                let ed = nu.powf(1.0 / 6.0) * kf.cbrt() * b.cbrt() / aspect;
                let visc = (nu * kf * kf).sqrt();
                let (lw, lr) = self.integrated(i);
                let e = vec![
                    lw.linf_l2,
                    ed * lw.l2_l2(),
                    b.sqrt() * kf.powf(1.5) / (aspect * aspect) * lw.l2_linf_phi(),
                    visc * lw.l2_l2_over_r(),
                ];
                let h = vec![lr.linf_l2, ed * lr.l2_l2(), visc * lr.l2_l2_over_r()];
                ModeEnergy {
                    k,
                    e_total: e.iter().sum(),
                    h_total: h.iter().sum(),
                    e,
                    h,
                    m0,
                }
            })
            .collect()
    }

    /// `(Σ_k E_k, Σ_k H_k)` so far.
    pub fn sums(&self) -> (f64, f64) {
        self.mode_energies().iter().fold((0.0, 0.0), |a, m| (a.0 + m.e_total, a.1 + m.h_total))
    }

    pub fn finish(&self, eps0: f64, eps1: f64) -> EnergyLedger {
        let modes = self.mode_energies();
        let (e_sum, h_sum) = modes.iter().fold((0.0, 0.0), |a, m| (a.0 + m.e_total, a.1 + m.h_total));
        EnergyLedger {
            modes,
            e_sum,
            h_sum,
            threshold_rhs: threshold_rhs(&self.params, eps0, eps1),
            snapshots: self.count,
        }
    }
}

/// Energy functionals of a stored trajectory.
pub fn energy_ledger(history: &[SimState], params: &FlowParams, grid: &RadialGrid, weight: WeightParams, eps0: f64, eps1: f64) -> EnergyLedger {
    let mut acc = EnergyAccumulator::new(params, weight);
    for s in history {
        acc.push(s, grid);
    }
    acc.finish(eps0, eps1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CVec;
    use crate::operators::assemble;
    use crate::random::DirichletSampler;

    #[test]
    fn zero_history_has_zero_energy() {
        let g = RadialGrid::build(2.0, 16).unwrap();
        let p = FlowParams::new(1e-2, 0.0, 1.0, 2.0, 2).unwrap();
        let hist = vec![SimState::zeros(2, 16, 0.1); 3];
        let l = energy_ledger(&hist, &p, &g, WeightParams::new(0.5).unwrap(), 0.01, 0.01);
        assert_eq!(l.e_sum + l.h_sum, 0.0);
        assert!(l.modes.iter().all(|m| m.e.iter().chain(&m.h).all(|v| *v == 0.0)));
    }

    #[test]
    fn single_snapshot_quadrature() {
        let g = RadialGrid::build(2.0, 24).unwrap();
        let p = FlowParams::new(1e-2, 0.0, 1.0, 2.0, 1).unwrap();
        let ops: Vec<_> = (-1..=1).map(|k| assemble(&p, k, &g).unwrap()).collect();
        let mut smp = DirichletSampler::new(4);
        let w: Vec<CVec> = (0..3).map(|_| smp.profile(&g)).collect();
        let r: Vec<CVec> = (0..3).map(|_| smp.profile(&g)).collect();
        let w0 = WeightParams::new(0.0).unwrap();
        let a = energy_ledger(&[SimState::from_profiles(w.clone(), r.clone(), &ops, 0.1).unwrap()], &p, &g, w0, 0.01, 0.01);
        let b = energy_ledger(&[SimState::from_profiles(w.clone(), r, &ops, 0.4).unwrap()], &p, &g, w0, 0.01, 0.01);
        let m = &a.modes[2];
        assert!((m.e[0] - g.l2(&w[2])).abs() < 1e-14);
        assert_eq!(a.modes[1].e[0], g.l2(&w[1]));
        // L²-in-time terms scale like dt^{1/2} as norms.
        assert!((b.modes[2].e[1] / m.e[1] - 2.0).abs() < 1e-12);
    }
}
