//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: the pseudospectral curve `λ ↦ σ_min(𝓛 - iλ)`
//! of one mode, the linear decay history of that mode, and a small nonlinear
//! run whose vorticity can be sampled on the annulus.

use wasm_bindgen::prelude::*;

use couette::analysis::gap::spectral_gap;
use couette::azimuthal::to_physical;
use couette::evolution::{evolve, fit_tail, ForcingSpec};
use couette::harness::sweep::bump_profile;
use couette::operators::assemble_lnu;
use couette::sim::{init_profiles, InitFamily, SimState, Simulator, TermSwitches};
use couette::{CVec, FlowParams, RadialGrid};

fn js(e: couette::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn setup(nu: f64, b: f64, aspect: f64, k_max: usize, n: usize) -> Result<(FlowParams, RadialGrid), couette::Error> {
    Ok((FlowParams::new(nu, 0.0, b, aspect, k_max)?, RadialGrid::build(aspect, n)?))
}

/// Sampled `σ_min(𝓛 - iλ)` with its minimum `Ψ`.
#[wasm_bindgen]
pub struct GapCurve {
    lambdas: Vec<f64>,
    sigmas: Vec<f64>,
    psi: f64,
    argmin: f64,
}

#[wasm_bindgen]
impl GapCurve {
    pub fn lambdas(&self) -> Vec<f64> {
        self.lambdas.clone()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.sigmas.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn psi(&self) -> f64 {
        self.psi
    }

    #[wasm_bindgen(getter)]
    pub fn argmin(&self) -> f64 {
        self.argmin
    }
}

pub fn gap_curve_native(nu: f64, b: f64, aspect: f64, k: i32, n: usize, steps: usize) -> Result<GapCurve, couette::Error> {
    let (p, grid) = setup(nu, b, aspect, k.unsigned_abs() as usize, n)?;
    let gap = spectral_gap(&p, k as i64, &grid, None, steps)?;
    let (lambdas, sigmas) = gap.samples.iter().copied().unzip();
    Ok(GapCurve {
        lambdas,
        sigmas,
        psi: gap.psi,
        argmin: gap.argmin_lambda,
    })
}

#[wasm_bindgen]
pub fn gap_curve(nu: f64, b: f64, aspect: f64, k: i32, n: usize, steps: usize) -> Result<GapCurve, JsError> {
    gap_curve_native(nu, b, aspect, k, n, steps).map_err(js)
}

/// `‖f(t)‖` for the unforced linear problem started from a smooth bump.
#[wasm_bindgen]
pub struct DecayCurve {
    times: Vec<f64>,
    norms: Vec<f64>,
    psi: f64,
    rate: f64,
}

#[wasm_bindgen]
impl DecayCurve {
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.norms.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Fitted tail rate over the second half of the run.
    #[wasm_bindgen(getter)]
    pub fn rate(&self) -> f64 {
        self.rate
    }
}

pub fn decay_curve_native(nu: f64, b: f64, aspect: f64, k: i32, n: usize, horizon_psi: f64, steps: usize) -> Result<DecayCurve, couette::Error> {
    let (p, grid) = setup(nu, b, aspect, k.unsigned_abs() as usize, n)?;
    let k = k as i64;
    let psi = spectral_gap(&p, k, &grid, None, 64)?.psi;
    let horizon = horizon_psi / psi;
    let op = assemble_lnu(&p, k, &grid)?;
    let run = evolve(&op, &grid, &bump_profile(&grid), &ForcingSpec::none(&grid), horizon, steps, 0.0, false)?;
    let rate = fit_tail(&run.l2_history, horizon)?.rate;
    let (times, norms) = run.l2_history.into_iter().unzip();
    Ok(DecayCurve { times, norms, psi, rate })
}

#[wasm_bindgen]
pub fn decay_curve(nu: f64, b: f64, aspect: f64, k: i32, n: usize, horizon_psi: f64, steps: usize) -> Result<DecayCurve, JsError> {
    decay_curve_native(nu, b, aspect, k, n, horizon_psi, steps).map_err(js)
}

/// A running nonlinear simulation from a random real perturbation.
#[wasm_bindgen]
pub struct Annulus {
    sim: Simulator,
    state: SimState,
}

impl Annulus {
    pub fn create(nu: f64, a: f64, b: f64, aspect: f64, k_max: usize, n: usize, amplitude: f64, seed: u64) -> Result<Self, couette::Error> {
        let p = FlowParams::new(nu, a, b, aspect, k_max)?;
        let grid = RadialGrid::build(aspect, n)?;
        let mut sim = Simulator::new(&p, &grid, 0.05, TermSwitches::default())?;
        let (w, r) = init_profiles(InitFamily::Random { seed }, &grid, k_max)?;
        let scale = |v: Vec<CVec>| v.into_iter().map(|f| f.map(|z| z * amplitude)).collect();
        let state = sim.initial_state(scale(w), scale(r))?;
        // Settle dt against the initial transport speed.
        let first = sim.advance(&state)?;
        Ok(Self { sim, state: first.state })
    }

    pub fn run(&mut self, steps: usize) -> Result<(), couette::Error> {
        for _ in 0..steps {
            self.state = self.sim.advance(&self.state)?.state;
        }
        Ok(())
    }

    /// Real vorticity `ω(r_i, θ_j)`, row-major by radius, with `m` angles.
    pub fn vorticity_samples(&self, m: usize) -> Result<Vec<f64>, couette::Error> {
        let grid = self.sim.grid();
        let hat = SimState::hat(&self.state.omega, grid, self.sim.params().a, self.state.t);
        Ok(to_physical(&hat, m)?.values.iter().map(|z| z.re).collect())
    }
}

#[wasm_bindgen]
impl Annulus {
    #[wasm_bindgen(constructor)]
    pub fn new(nu: f64, a: f64, b: f64, aspect: f64, k_max: usize, n: usize, amplitude: f64, seed: u32) -> Result<Annulus, JsError> {
        Self::create(nu, a, b, aspect, k_max, n, amplitude, seed as u64).map_err(js)
    }

    pub fn step(&mut self, steps: usize) -> Result<(), JsError> {
        self.run(steps).map_err(js)
    }

    pub fn vorticity(&self, m: usize) -> Result<Vec<f64>, JsError> {
        self.vorticity_samples(m).map_err(js)
    }

    pub fn radii(&self) -> Vec<f64> {
        self.sim.grid().nodes().to_vec()
    }

    #[wasm_bindgen(getter)]
    pub fn time(&self) -> f64 {
        self.state.t
    }

    #[wasm_bindgen(getter)]
    pub fn dt(&self) -> f64 {
        self.sim.dt()
    }

    /// `‖ω_≠‖ + ‖ρ_≠‖` over the nonzero modes.
    #[wasm_bindgen(getter)]
    pub fn perturbation_norm(&self) -> f64 {
        self.state.nonzero_norm(self.sim.grid())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_curve_minimum_is_the_reported_psi() {
        let c = gap_curve_native(1e-2, 1.0, 2.0, 1, 32, 64).unwrap();
        assert_eq!(c.lambdas.len(), 64);
        let sampled = c.sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(c.psi > 0.0 && c.psi <= sampled * (1.0 + 1e-12));
    }

    #[test]
    fn decay_curve_is_monotone_and_close_to_psi() {
        let c = decay_curve_native(1e-2, 1.0, 2.0, 1, 32, 5.0, 400).unwrap();
        assert_eq!(c.times.len(), 401);
        assert!(c.norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(c.rate > 0.5 * c.psi && c.rate < 2.0 * c.psi, "rate {} psi {}", c.rate, c.psi);
    }

    #[test]
    fn annulus_samples_are_real_and_shaped() {
        let mut a = Annulus::create(1e-2, 1.0, 1.0, 2.0, 4, 16, 0.1, 3).unwrap();
        a.run(5).unwrap();
        let v = a.vorticity_samples(32).unwrap();
        assert_eq!(v.len(), 16 * 32);
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(a.time() > 0.0 && a.perturbation_norm() > 0.0);
    }
}
