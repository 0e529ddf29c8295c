use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::field::{scale_by, ModeField, Rep};
use crate::grid::{CVec, RadialGrid};
use crate::operators::OperatorBundle;

/// Truncated perturbation state. Modes are stored for `k = -K..=K` at index
/// `k + K`; nonzero modes hold weighted profiles, the zero mode holds the
/// plain θ-average (`ω_=`, `ρ_=`).
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    /// Step size that produced this state (the configured step for `t = 0`).
    pub dt: f64,
    pub k_max: usize,
    pub omega: Vec<ModeField>,
    pub rho: Vec<ModeField>,
    /// Stream functions solved from `omega`, same layout.
    pub phi: Vec<ModeField>,
}

fn rep_of(k: i64) -> Rep {
    if k == 0 {
        Rep::Hat
    } else {
        Rep::Weighted
    }
}

impl SimState {
    pub fn zeros(k_max: usize, n: usize, dt: f64) -> Self {
        let mk = || -> Vec<ModeField> { (-(k_max as i64)..=k_max as i64).map(|k| ModeField::zeros(k, n, rep_of(k))).collect() };
        Self {
            t: 0.0,
            dt,
            k_max,
            omega: mk(),
            rho: mk(),
            phi: mk(),
        }
    }

    /// Builds a state from stored profiles (`k = -K..=K`) and solves for the
    /// stream functions.
    pub fn from_profiles(omega: Vec<CVec>, rho: Vec<CVec>, ops: &[OperatorBundle], dt: f64) -> Result<Self> {
        if omega.len() != rho.len() || omega.len().is_multiple_of(2) || omega.len() != ops.len() {
            return Err(precondition("profiles must cover k = -K..=K for both fields"));
        }
        let k_max = omega.len() / 2;
        let wrap = |v: Vec<CVec>| -> Vec<ModeField> {
            v.into_iter()
                .enumerate()
                .map(|(i, f)| {
                    let k = i as i64 - k_max as i64;
                    ModeField::new(k, f, rep_of(k))
                })
                .collect()
        };
        let mut s = Self {
            t: 0.0,
            dt,
            k_max,
            omega: wrap(omega),
            rho: wrap(rho),
            phi: Vec::new(),
        };
        s.refresh_phi(ops)?;
        Ok(s)
    }

    pub fn index(&self, k: i64) -> Option<usize> {
        let idx = k + self.k_max as i64;
        (idx >= 0 && idx <= 2 * self.k_max as i64).then_some(idx as usize)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let k = self.k_max as i64;
        -k..=k
    }

    pub fn refresh_phi(&mut self, ops: &[OperatorBundle]) -> Result<()> {
        self.phi = self
            .omega
            .iter()
            .zip(ops)
            .map(|(w, op)| Ok(ModeField::new(w.k, op.solve_delta(&w.values)?, w.rep)))
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    /// Plain Fourier coefficients `f̂_k` at time `t`.
    pub fn hat(fields: &[ModeField], grid: &RadialGrid, a: f64, t: f64) -> Vec<CVec> {
        fields
            .iter()
            .map(|f| match f.rep {
                Rep::Hat => f.values.clone(),
                Rep::Weighted => scale_by(&f.values, grid, -0.5, Complex64::from_polar(1.0, -(f.k as f64) * a * t)),
            })
            .collect()
    }

    /// Weighted profiles for every mode, the zero mode as `r^{1/2}f_=`.
    pub fn weighted(fields: &[ModeField], grid: &RadialGrid) -> Vec<CVec> {
        fields
            .iter()
            .map(|f| match f.rep {
                Rep::Weighted => f.values.clone(),
                Rep::Hat => scale_by(&f.values, grid, 0.5, Complex64::new(1.0, 0.0)),
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.omega
            .iter()
            .chain(&self.rho)
            .all(|f| f.values.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Largest `|f_{-k} - conj(f_k)|` over both fields and all nodes.
    pub fn conjugate_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for fields in [&self.omega, &self.rho] {
            for k in 0..=self.k_max {
                let p = &fields[self.k_max + k].values;
                let m = &fields[self.k_max - k].values;
                for (a, b) in p.iter().zip(m.iter()) {
                    worst = worst.max((a.conj() - b).norm());
                }
            }
        }
        worst
    }

    /// Largest absolute nodal value over both fields.
    pub fn max_abs(&self) -> f64 {
        self.omega
            .iter()
            .chain(&self.rho)
            .flat_map(|f| f.values.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_{k≠0} ‖ω_k‖ + ‖ρ_k‖`.
    pub fn nonzero_norm(&self, grid: &RadialGrid) -> f64 {
        self.omega.iter().chain(&self.rho).filter(|f| f.k != 0).map(|f| grid.l2(&f.values)).sum()
    }

    /// Sets every nonzero mode to zero.
    pub fn zero_nonzero_modes(&mut self) {
        for f in self.omega.iter_mut().chain(self.rho.iter_mut()).chain(self.phi.iter_mut()) {
            if f.k != 0 {
                f.values.fill(Complex64::new(0.0, 0.0));
            }
        }
    }
}

/// Serialized checkpoint of a state, values as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub t: f64,
    pub dt: f64,
    pub k_max: usize,
    pub omega: Vec<Vec<[f64; 2]>>,
    pub rho: Vec<Vec<[f64; 2]>>,
}

pub const CHECKPOINT_VERSION: u32 = 1;

impl Checkpoint {
    pub fn of(state: &SimState) -> Self {
        let pack = |v: &[ModeField]| v.iter().map(|f| f.values.iter().map(|z| [z.re, z.im]).collect()).collect();
        Self {
            version: CHECKPOINT_VERSION,
            t: state.t,
            dt: state.dt,
            k_max: state.k_max,
            omega: pack(&state.omega),
            rho: pack(&state.rho),
        }
    }

    pub fn restore(&self, ops: &[OperatorBundle]) -> Result<SimState> {
        if self.version != CHECKPOINT_VERSION {
            return Err(precondition(format!("unsupported checkpoint version {}", self.version)));
        }
        let unpack = |v: &[Vec<[f64; 2]>]| {
            v.iter()
                .map(|f| CVec::from_iterator(f.len(), f.iter().map(|p| Complex64::new(p[0], p[1]))))
                .collect()
        };
        let mut s = SimState::from_profiles(unpack(&self.omega), unpack(&self.rho), ops, self.dt)?;
        s.t = self.t;
        Ok(s)
    }
}
