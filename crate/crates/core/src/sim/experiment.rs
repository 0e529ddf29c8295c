use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::gap::spectral_gap;
use crate::error::{domain, precondition, Result};
use crate::evolution::{fit_tail, DecayFit, WeightParams};
use crate::grid::{CVec, RadialGrid};
use crate::operators::FlowParams;
use crate::random::DirichletSampler;

use super::energy::{threshold_rhs, EnergyAccumulator, EnergyLedger, ModeEnergy};
use super::state::SimState;
use super::stepper::Simulator;
use super::terms::TermSwitches;

/// Shape of the initial perturbation before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitFamily {
    /// Weighted profile `sin(π(r-1)/(R-1))` in modes `±mode` for both fields.
    Bump { mode: i64 },
    /// Smooth random real fields in every mode `1 ≤ |k| ≤ K`, amplitudes
    /// decaying like `1/k²`.
    Random { seed: u64 },
}

impl Default for InitFamily {
    fn default() -> Self {
        InitFamily::Bump { mode: 1 }
    }
}

/// Unscaled `(ω, ρ)` stored profiles for `k = -K..=K`.
pub fn init_profiles(family: InitFamily, grid: &RadialGrid, k_max: usize) -> Result<(Vec<CVec>, Vec<CVec>)> {
    let n = grid.n();
    let len = 2 * k_max + 1;
    let mut omega = vec![CVec::zeros(n); len];
    let mut rho = vec![CVec::zeros(n); len];
    match family {
        InitFamily::Bump { mode } => {
            if mode == 0 || mode.unsigned_abs() as usize > k_max {
                return Err(precondition(format!("bump mode {mode} must satisfy 1 ≤ |k| ≤ {k_max}")));
            }
            let span = grid.aspect() - 1.0;
            let mut bump = grid.sample(|r| (std::f64::consts::PI * (r - 1.0) / span).sin());
            bump[0] = Complex64::new(0.0, 0.0);
            bump[n - 1] = Complex64::new(0.0, 0.0);
            for k in [mode, -mode] {
                let i = (k + k_max as i64) as usize;
                omega[i] = bump.clone();
                rho[i] = bump.clone();
            }
        }
        InitFamily::Random { seed } => {
            let mut smp = DirichletSampler::with_modes(seed, 8);
            for k in 1..=k_max {
                let s = Complex64::new(1.0 / (k * k) as f64, 0.0);
                for fields in [&mut omega, &mut rho] {
                    let f = smp.profile(grid) * s;
                    fields[k_max - k] = f.map(|z| z.conj());
                    fields[k_max + k] = f;
                }
            }
        }
    }
    Ok((omega, rho))
}

/// The two smallness quantities of the initial data and their thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    /// `R‖ω₀‖_{L²H¹_r} + R^{-2}(log R)^{-3/2}‖r²ω₀‖ + R³‖ω₀/r³‖`.
    pub i_omega: f64,
    /// `‖ρ₀‖_{H¹}`.
    pub i_rho: f64,
    pub omega_threshold: f64,
    pub rho_threshold: f64,
    pub cond1: bool,
    pub cond2: bool,
}

impl InitialConditions {
    pub fn holds(&self) -> bool {
        self.cond1 && self.cond2
    }
}

/// `(I_ω, I_ρ)` of stored profiles. Norms use `dr` in radius and the
/// normalized angle measure, so they are mode sums of plain coefficients.
pub fn smallness(grid: &RadialGrid, omega: &[CVec], rho: &[CVec]) -> (f64, f64) {
    let k_max = omega.len() / 2;
    let hat = |f: &CVec, k: i64| {
        if k == 0 {
            f.clone()
        } else {
            crate::field::scale_by(f, grid, -0.5, Complex64::new(1.0, 0.0))
        }
    };
    let (mut h1, mut r2, mut rm3, mut rho_sq) = (0.0, 0.0, 0.0, 0.0);
    for (i, (w, p)) in omega.iter().zip(rho).enumerate() {
        let k = i as i64 - k_max as i64;
        let w = hat(w, k);
        let p = hat(p, k);
        h1 += grid.h1r(&w).powi(2);
        r2 += grid.l2_rpow(&w, 2.0).powi(2);
        rm3 += grid.l2_rpow(&w, -3.0).powi(2);
        rho_sq += grid.l2(&p).powi(2) + grid.l2(&grid.differentiate(&p)).powi(2) + (k * k) as f64 * grid.l2_over_r(&p).powi(2);
    }
    let r = grid.aspect();
    let i_omega = r * h1.sqrt() + r.powi(-2) * r.ln().powf(-1.5) * r2.sqrt() + r.powi(3) * rm3.sqrt();
    (i_omega, rho_sq.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Stable,
    Growth,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentVerdict {
    pub outcome: Outcome,
    /// `max_t ΣE_k(t) / ΣE_k(0⁺)` where `ΣE_k(t)` is the functional on `[0, t]`
    /// and `0⁺` is the first step.
    pub sup_energy_ratio: f64,
    pub horizon: f64,
    pub horizon_reached: f64,
    pub blowup: bool,
    /// Relative change of `ΣE_k`, `ΣH_k` when every other snapshot is dropped.
    pub sparse_change: f64,
    pub hypothesis_held: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: FlowParams,
    pub n: usize,
    /// Target value of `I_ω`; `ρ₀` is scaled to the same fraction of its
    /// threshold.
    pub epsilon: f64,
    #[serde(default = "default_eps")]
    pub eps0: f64,
    #[serde(default = "default_eps")]
    pub eps1: f64,
    #[serde(default = "default_factor")]
    pub stability_factor: f64,
    /// Weight constant; defaults to half the empirical gap constant at `k = 1`.
    #[serde(default)]
    pub c_prime: Option<f64>,
    /// Defaults to ten weight e-folding times.
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub init: InitFamily,
    #[serde(default = "default_switches")]
    pub switches: TermSwitches,
    /// Energy series row spacing in steps (0 disables the series).
    #[serde(default)]
    pub series_stride: usize,
}

fn default_eps() -> f64 {
    0.01
}
fn default_factor() -> f64 {
    4.0
}
fn default_switches() -> TermSwitches {
    TermSwitches::default()
}

impl ExperimentConfig {
    pub fn new(params: FlowParams, n: usize, epsilon: f64) -> Self {
        Self {
            params,
            n,
            epsilon,
            eps0: default_eps(),
            eps1: default_eps(),
            stability_factor: default_factor(),
            c_prime: None,
            horizon: None,
            dt: None,
            init: InitFamily::default(),
            switches: TermSwitches::default(),
            series_stride: 0,
        }
    }
}

/// One row of the energy time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    pub modes: Vec<ModeEnergy>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub verdict: ExperimentVerdict,
    pub ledger: EnergyLedger,
    pub conditions: InitialConditions,
    pub c_prime: f64,
    /// `c'(ν)^{1/3}|B|^{2/3}R^{-2}`, the weight rate of `k = 1`.
    pub weight_rate: f64,
    pub psi: f64,
    pub dt: f64,
    pub steps: usize,
    /// Tail decay of `Σ_{k≠0}(‖ω_k‖ + ‖ρ_k‖)`.
    pub nonzero_decay: Option<DecayFit>,
    pub series: Vec<EnergyRow>,
    #[serde(skip)]
    pub final_state: Option<SimState>,
}

/// Resolved run settings: `(c', Ψ, horizon, dt)`.
pub fn run_settings(cfg: &ExperimentConfig, grid: &RadialGrid) -> Result<(f64, f64, f64, f64)> {
    let p = &cfg.params;
    let psi = spectral_gap(p, 1, grid, None, 64)?.psi;
    let enh = p.enhanced_rate(1);
    let c_prime = match cfg.c_prime {
        Some(c) => c,
        None if enh > 0.0 => 0.5 * psi / enh,
        None => 0.0,
    };
    let rate = c_prime * enh;
    let horizon = match cfg.horizon {
        Some(h) => h,
        None if rate > 0.0 => 10.0 / rate,
        None => return Err(precondition("horizon is required when the weight rate vanishes")),
    };
    if !(horizon > 0.0) {
        return Err(domain(format!("horizon must be positive, got {horizon}")));
    }
    let skew = p.k_max.max(1) as f64 * p.b.abs();
    let mut dt = cfg.dt.unwrap_or_else(|| {
        let a = if skew > 0.0 { 0.1 / skew } else { f64::INFINITY };
        let b = if rate > 0.0 { 0.05 / rate } else { f64::INFINITY };
        a.min(b).min(horizon / 200.0)
    });
    let steps = (horizon / dt).ceil();
    dt = horizon / steps;
    Ok((c_prime, psi, horizon, dt))
}

/// Absolute size beyond which a run counts as blown up.
const BLOWUP: f64 = 1e8;

/// Runs one simulation from the scaled initial family and classifies it.
pub fn run_stability_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if !(cfg.epsilon >= 0.0) {
        return Err(domain(format!("amplitude must be nonnegative, got {}", cfg.epsilon)));
    }
    let p = cfg.params;
    let grid = RadialGrid::build(p.aspect, cfg.n)?;
    let (c_prime, psi, horizon, dt) = run_settings(cfg, &grid)?;
    let weight = WeightParams::new(c_prime)?;
    let [w_thr, r_thr] = threshold_rhs(&p, cfg.eps0, cfg.eps1);

    let (mut omega, mut rho) = init_profiles(cfg.init, &grid, p.k_max)?;
    let (iw, ir) = smallness(&grid, &omega, &rho);
    let saturation = if w_thr > 0.0 { cfg.epsilon / w_thr } else { 0.0 };
    let sw = if iw > 0.0 { cfg.epsilon / iw } else { 0.0 };
    let sr = if ir > 0.0 { saturation * r_thr / ir } else { 0.0 };
    omega.iter_mut().for_each(|f| *f *= Complex64::new(sw, 0.0));
    rho.iter_mut().for_each(|f| *f *= Complex64::new(sr, 0.0));
    let (i_omega, i_rho) = smallness(&grid, &omega, &rho);
    let tol = 1e-12;
    let conditions = InitialConditions {
        i_omega,
        i_rho,
        omega_threshold: w_thr,
        rho_threshold: r_thr,
        cond1: i_omega <= w_thr * (1.0 + tol),
        cond2: i_rho <= r_thr * (1.0 + tol),
    };

    let mut sim = Simulator::new(&p, &grid, dt, cfg.switches)?;
    let mut state = sim.initial_state(omega, rho)?;
    let mut full = EnergyAccumulator::new(&p, weight);
    let mut sparse = EnergyAccumulator::new(&p, weight);
    full.push(&state, &grid);
    sparse.push(&state, &grid);
    let mut history = vec![(0.0, state.nonzero_norm(&grid))];
    let mut series = Vec::new();
    if cfg.series_stride > 0 {
        series.push(EnergyRow {
            t: 0.0,
            modes: full.mode_energies(),
        });
    }
    let mut e_first = None;
    let mut ratio: f64 = 0.0;
    let mut blowup = false;
    let mut steps = 0usize;
    let mut pushed_sparse = true;
    while state.t < horizon - 1e-9 * horizon {
        let next = match sim.advance(&state) {
            Ok(r) => r.state,
            Err(_) => {
                blowup = true;
                break;
            }
        };
        if !next.is_finite() || next.max_abs() > BLOWUP {
            blowup = true;
            break;
        }
        state = next;
        steps += 1;
        full.push(&state, &grid);
        pushed_sparse = steps.is_multiple_of(2);
        if pushed_sparse {
            sparse.push(&state, &grid);
        }
        history.push((state.t, state.nonzero_norm(&grid)));
        let e = full.sums().0;
        let e0 = *e_first.get_or_insert(e);
        if e0 > 0.0 {
            ratio = ratio.max(e / e0);
        }
        if cfg.series_stride > 0 && steps.is_multiple_of(cfg.series_stride) {
            series.push(EnergyRow {
                t: state.t,
                modes: full.mode_energies(),
            });
        }
    }
    if !pushed_sparse && !blowup {
        sparse.push(&state, &grid);
    }

    let ledger = full.finish(cfg.eps0, cfg.eps1);
    let thin = sparse.finish(cfg.eps0, cfg.eps1);
    let rel = |a: f64, b: f64| if a == 0.0 && b == 0.0 { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    let sparse_change = rel(ledger.e_sum, thin.e_sum).max(rel(ledger.h_sum, thin.h_sum));
    let outcome = if blowup || ratio > cfg.stability_factor {
        Outcome::Growth
    } else if sparse_change > 0.02 {
        Outcome::Inconclusive
    } else {
        Outcome::Stable
    };
    let nonzero_decay = if blowup || history[0].1 == 0.0 {
        None
    } else {
        fit_tail(&history, state.t).ok()
    };
    Ok(ExperimentOutcome {
        verdict: ExperimentVerdict {
            outcome,
            sup_energy_ratio: ratio,
            horizon,
            horizon_reached: state.t,
            blowup,
            sparse_change,
            hypothesis_held: conditions.holds(),
        },
        ledger,
        conditions,
        c_prime,
        weight_rate: c_prime * p.enhanced_rate(1),
        psi,
        dt: sim.dt(),
        steps,
        nonzero_decay,
        series,
        final_state: Some(state),
    })
}
