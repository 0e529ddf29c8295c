use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::evolution::CrankNicolson;
use crate::grid::{CVec, RadialGrid};
use crate::operators::{assemble, FlowParams, OperatorBundle};

use super::state::SimState;
use super::terms::{explicit_rhs, TermSwitches};

/// Fraction of the explicit transport time scale allowed per step.
pub const CFL: f64 = 0.5;
/// Smallest step before a run is declared blown up.
pub const MIN_DT: f64 = 1e-9;

/// Second-order IMEX integrator: Crank-Nicolson for `𝓛_ν` on every mode,
/// Heun (explicit trapezoid) for transport and buoyancy.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: FlowParams,
    grid: RadialGrid,
    ops: Vec<OperatorBundle>,
    cn: Vec<CrankNicolson>,
    dt: f64,
    switches: TermSwitches,
}

/// Result of one accepted step.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub state: SimState,
    /// Step size actually used (after any halving).
    pub dt: f64,
    pub halvings: usize,
}

impl Simulator {
    pub fn new(params: &FlowParams, grid: &RadialGrid, dt: f64, switches: TermSwitches) -> Result<Self> {
        params.validate()?;
        let k = params.k_max as i64;
        let ops = (-k..=k).map(|k| assemble(params, k, grid)).collect::<Result<Vec<_>>>()?;
        let cn = ops.iter().map(|op| CrankNicolson::new(op, dt)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            grid: grid.clone(),
            ops,
            cn,
            dt,
            switches,
        })
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn ops(&self) -> &[OperatorBundle] {
        &self.ops
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn switches(&self) -> TermSwitches {
        self.switches
    }

    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(domain(format!("time step must be positive, got {dt}")));
        }
        self.cn = self.ops.iter().map(|op| CrankNicolson::new(op, dt)).collect::<Result<Vec<_>>>()?;
        self.dt = dt;
        Ok(())
    }

    /// State with the given profiles (`k = -K..=K`) at `t = 0`.
    pub fn initial_state(&self, omega: Vec<CVec>, rho: Vec<CVec>) -> Result<SimState> {
        SimState::from_profiles(omega, rho, &self.ops, self.dt)
    }

    /// Largest step allowed by the transport speed `velocity`.
    pub fn cfl_limit(&self, velocity: f64) -> f64 {
        let k = self.params.k_max.max(1) as f64;
        if velocity > 0.0 {
            CFL / (k * velocity)
        } else {
            f64::INFINITY
        }
    }

    fn implicit(&self, state: &SimState, f_omega: &[CVec], f_rho: &[CVec]) -> Result<(Vec<CVec>, Vec<CVec>)> {
        let dt = Complex64::new(self.dt, 0.0);
        let mut omega = Vec::with_capacity(self.ops.len());
        let mut rho = Vec::with_capacity(self.ops.len());
        for (i, (op, cn)) in self.ops.iter().zip(&self.cn).enumerate() {
            for (src, force, out) in [(&state.omega[i].values, &f_omega[i], &mut omega), (&state.rho[i].values, &f_rho[i], &mut rho)] {
                let load = op.load(force) * dt;
                out.push(op.from_iso(&cn.advance(&op.to_iso(src), Some(&load))?));
            }
        }
        Ok((omega, rho))
    }

    fn assemble_state(&self, t: f64, omega: Vec<CVec>, rho: Vec<CVec>) -> Result<SimState> {
        let mut s = SimState::from_profiles(omega, rho, &self.ops, self.dt)?;
        s.t = t;
        Ok(s)
    }

    /// One step with the current `dt` and no step-size control.
    pub fn step(&self, state: &SimState) -> Result<SimState> {
        let e0 = explicit_rhs(state, &self.params, &self.grid, self.switches);
        self.step_from(state, &e0.omega, &e0.rho)
    }

    fn step_from(&self, state: &SimState, e0w: &[CVec], e0r: &[CVec]) -> Result<SimState> {
        let t1 = state.t + self.dt;
        let (pw, pr) = self.implicit(state, e0w, e0r)?;
        let predictor = self.assemble_state(t1, pw, pr)?;
        let e1 = explicit_rhs(&predictor, &self.params, &self.grid, self.switches);
        let avg = |a: &[CVec], b: &[CVec]| -> Vec<CVec> { a.iter().zip(b).map(|(x, y)| (x + y) * Complex64::new(0.5, 0.0)).collect() };
        let (w, r) = self.implicit(state, &avg(e0w, &e1.omega), &avg(e0r, &e1.rho))?;
        self.assemble_state(t1, w, r)
    }

    /// One step, halving `dt` until the transport restriction holds. The
    /// reduced step is kept for subsequent calls.
    pub fn advance(&mut self, state: &SimState) -> Result<StepReport> {
        let mut halvings = 0;
        loop {
            let e0 = explicit_rhs(state, &self.params, &self.grid, self.switches);
            let limit = self.cfl_limit(e0.velocity);
            if self.dt <= limit || !limit.is_finite() {
                let next = self.step_from(state, &e0.omega, &e0.rho)?;
                return Ok(StepReport {
                    state: next,
                    dt: self.dt,
                    halvings,
                });
            }
            let dt = 0.5 * self.dt;
            if dt < MIN_DT || !e0.velocity.is_finite() {
                return Err(crate::Error::Conditioning(format!("time step fell below {MIN_DT}")));
            }
            self.set_dt(dt)?;
            halvings += 1;
        }
    }
}

/// One IMEX step of the truncated system with the simulator's current `dt`.
pub fn step_nonlinear(sim: &Simulator, state: &SimState) -> Result<SimState> {
    sim.step(state)
}
