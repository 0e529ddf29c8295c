//! Time integration of the forced linear mode equation
//! `∂_t f + 𝓛 f = h₁ - g ∂_r h₂` and the weighted space-time norms of its
//! solution.
//!
//! Steps use the implicit midpoint rule (Crank-Nicolson for this linear
//! problem) with the forcing sampled at the half step. The accretive part is
//! then dissipated exactly, so unforced `L²` norms never grow.

use std::sync::Arc;

use nalgebra::LU;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::fit::fit_line;
use crate::error::{domain, precondition, Error, Result};
use crate::field::{ModeField, Rep};
use crate::grid::{CMat, CVec, RadialGrid};
use crate::operators::{assemble_lnu, FlowParams, OperatorBundle};

/// Exponential weight `𝓔(t) = e^{c'(νk²)^{1/3}|B|^{2/3}R^{-2} t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub c_prime: f64,
}

impl WeightParams {
    pub fn new(c_prime: f64) -> Result<Self> {
        if !(c_prime >= 0.0) {
            return Err(domain(format!("c' must be nonnegative, got {c_prime}")));
        }
        Ok(Self { c_prime })
    }

    pub fn rate(&self, params: &FlowParams, k: i64) -> f64 {
        self.c_prime * params.enhanced_rate(k)
    }
}

/// Time-dependent nodal profile.
pub type Profile = Arc<dyn Fn(f64) -> CVec + Send + Sync>;

/// Forcing `h₁(t) - g ∂_r h₂(t)` with a static weight `g(r)`.
#[derive(Clone)]
pub struct ForcingSpec {
    pub h1: Option<Profile>,
    pub h2: Option<Profile>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
}

impl std::fmt::Debug for ForcingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForcingSpec")
            .field("h1", &self.h1.is_some())
            .field("h2", &self.h2.is_some())
            .finish()
    }
}

impl ForcingSpec {
    pub fn none(grid: &RadialGrid) -> Self {
        Self {
            h1: None,
            h2: None,
            g: vec![0.0; grid.n()],
            dg: vec![0.0; grid.n()],
        }
    }

    /// `g` sampled on the grid, its derivative taken spectrally.
    pub fn with_weight(grid: &RadialGrid, g: impl Fn(f64) -> f64, h1: Option<Profile>, h2: Option<Profile>) -> Self {
        let gv: Vec<f64> = grid.nodes().iter().map(|&r| g(r)).collect();
        let dg = grid.differentiate_real(&gv);
        Self { h1, h2, g: gv, dg }
    }

    /// `profile · e^{-decay t}`.
    pub fn decaying(profile: CVec, decay: f64) -> Profile {
        Arc::new(move |t| profile.map(|z| z * (-decay * t).exp()))
    }

    pub fn is_zero(&self) -> bool {
        self.h1.is_none() && self.h2.is_none()
    }

    /// Nodal values of `h₁ - g ∂_r h₂` at time `t`.
    pub fn eval(&self, grid: &RadialGrid, t: f64) -> CVec {
        let mut out = self.h1.as_ref().map_or_else(|| CVec::zeros(grid.n()), |h| h(t));
        if let Some(h2) = &self.h2 {
            let d = grid.differentiate(&h2(t));
            for i in 0..out.len() {
                out[i] -= d[i] * self.g[i];
            }
        }
        out
    }

    /// `(‖r h₁‖², ‖(|g| + r|g'|) h₂‖²)` at time `t`.
    pub fn norms_sq(&self, grid: &RadialGrid, t: f64) -> (f64, f64) {
        let a = self.h1.as_ref().map_or(0.0, |h| grid.l2_rpow(&h(t), 1.0).powi(2));
        let b = self.h2.as_ref().map_or(0.0, |h| {
            let v = h(t);
            let r = grid.nodes();
            let s: f64 = (0..v.len())
                .map(|i| {
                    let m = self.g[i].abs() + r[i] * self.dg[i].abs();
                    grid.weights()[i] * m * m * v[i].norm_sqr()
                })
                .sum();
            s
        });
        (a, b)
    }
}

/// Cached factorization of `I + (dt/2)Â` for one mode.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    dt: f64,
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    explicit: CMat,
}

impl CrankNicolson {
    pub fn new(op: &OperatorBundle, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(domain(format!("time step must be positive, got {dt}")));
        }
        let m = op.dim();
        let half = op.l_iso() * Complex64::new(0.5 * dt, 0.0);
        let id = CMat::identity(m, m);
        let lu = LU::new(&id + &half);
        Ok(Self { dt, lu, explicit: id - half })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances isometric coordinates by one step with the given load vector
    /// (already multiplied by `dt`).
    pub fn advance(&self, u: &CVec, load: Option<&CVec>) -> Result<CVec> {
        let mut rhs = &self.explicit * u;
        if let Some(l) = load {
            rhs += l;
        }
        self.lu
            .solve(&rhs)
            .ok_or_else(|| Error::Conditioning("implicit step matrix is singular".into()))
    }
}

/// Crank-Nicolson stepper on nodal values of one mode.
pub struct LinearStepper<'a> {
    op: &'a OperatorBundle,
    cn: CrankNicolson,
}

impl<'a> LinearStepper<'a> {
    pub fn new(op: &'a OperatorBundle, dt: f64) -> Result<Self> {
        Ok(Self {
            op,
            cn: CrankNicolson::new(op, dt)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.cn.dt
    }

    /// One step of nodal values from `t` to `t + dt`.
    pub fn step(&self, grid: &RadialGrid, f: &CVec, forcing: &ForcingSpec, t: f64) -> Result<CVec> {
        let dt = self.cn.dt;
        let u = self.op.to_iso(f);
        let load = if forcing.is_zero() {
            None
        } else {
            Some(self.op.load(&forcing.eval(grid, t + 0.5 * dt)) * Complex64::new(dt, 0.0))
        };
        Ok(self.op.from_iso(&self.cn.advance(&u, load.as_ref())?))
    }
}

/// Advances a weighted profile by one implicit-midpoint step.
pub fn step_linear(state: &ModeField, bundle: &OperatorBundle, grid: &RadialGrid, forcing: &ForcingSpec, t: f64, dt: f64) -> Result<ModeField> {
    if state.rep != Rep::Weighted && !bundle.is_zero_mode() {
        return Err(precondition("linear steps act on weighted profiles"));
    }
    let stepper = LinearStepper::new(bundle, dt)?;
    let values = stepper.step(grid, &state.values, forcing, t)?;
    Ok(ModeField::new(state.k, values, state.rep))
}

/// Squared norms of one snapshot entering the space-time ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerSample {
    pub t: f64,
    pub l2_sq: f64,
    pub dr_sq: f64,
    pub over_r_sq: f64,
    pub phi_dr_sq: f64,
    pub phi_over_r_sq: f64,
    /// `‖r^{-1/2} φ‖²_∞`.
    pub phi_linf_sq: f64,
}

impl LedgerSample {
    pub fn of(grid: &RadialGrid, t: f64, f: &CVec, phi: Option<&CVec>) -> Self {
        let df = grid.differentiate(f);
        let (phi_dr_sq, phi_over_r_sq, phi_linf_sq) = match phi {
            Some(p) => (
                grid.l2(&grid.differentiate(p)).powi(2),
                grid.l2_over_r(p).powi(2),
                grid.linf_rpow(p, -0.5).powi(2),
            ),
            None => (0.0, 0.0, 0.0),
        };
        Self {
            t,
            l2_sq: grid.l2(f).powi(2),
            dr_sq: grid.l2(&df).powi(2),
            over_r_sq: grid.l2_over_r(f).powi(2),
            phi_dr_sq,
            phi_over_r_sq,
            phi_linf_sq,
        }
    }

    fn channels(&self) -> [f64; 6] {
        [self.l2_sq, self.dr_sq, self.over_r_sq, self.phi_dr_sq, self.phi_over_r_sq, self.phi_linf_sq]
    }
}

/// Running weighted space-time norms, accumulated by the trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeLedger {
    pub rate: f64,
    /// `sup_t ‖𝓔 f‖`.
    pub linf_l2: f64,
    /// `∫ ‖𝓔 f‖²`, `∫ ‖𝓔 ∂_r f‖²`, `∫ ‖𝓔 f/r‖²`.
    pub l2_l2_sq: f64,
    pub l2_l2_dr_sq: f64,
    pub l2_l2_over_r_sq: f64,
    /// `∫ ‖𝓔 ∂_r φ‖²`, `∫ ‖𝓔 φ/r‖²`.
    pub l2_l2_phi_dr_sq: f64,
    pub l2_l2_phi_over_r_sq: f64,
    /// `∫ ‖𝓔 r^{-1/2} φ‖²_∞`.
    pub l2_linf_phi_sq: f64,
    pub dt_log: Vec<f64>,
    last: Option<LedgerSample>,
}

impl SpaceTimeLedger {
    pub fn new(rate: f64) -> Self {
        Self {
            rate,
            linf_l2: 0.0,
            l2_l2_sq: 0.0,
            l2_l2_dr_sq: 0.0,
            l2_l2_over_r_sq: 0.0,
            l2_l2_phi_dr_sq: 0.0,
            l2_l2_phi_over_r_sq: 0.0,
            l2_linf_phi_sq: 0.0,
            dt_log: Vec::new(),
            last: None,
        }
    }

    fn weight_sq(&self, t: f64) -> f64 {
        (2.0 * self.rate * t).exp()
    }

    pub fn push(&mut self, s: LedgerSample) {
        let w = self.weight_sq(s.t);
        self.linf_l2 = self.linf_l2.max((w * s.l2_sq).sqrt());
        if let Some(prev) = self.last {
            let dt = s.t - prev.t;
            let wp = self.weight_sq(prev.t);
            let a = prev.channels();
            let b = s.channels();
            let inc: Vec<f64> = (0..6).map(|i| 0.5 * dt * (wp * a[i] + w * b[i])).collect();
            self.l2_l2_sq += inc[0];
            self.l2_l2_dr_sq += inc[1];
            self.l2_l2_over_r_sq += inc[2];
            self.l2_l2_phi_dr_sq += inc[3];
            self.l2_l2_phi_over_r_sq += inc[4];
            self.l2_linf_phi_sq += inc[5];
            self.dt_log.push(dt);
        }
        self.last = Some(s);
    }

    /// Rebuilds a ledger from stored samples.
    pub fn recompute(rate: f64, samples: &[LedgerSample]) -> Self {
        let mut l = Self::new(rate);
        for s in samples {
            l.push(*s);
        }
        l
    }

    pub fn l2_l2(&self) -> f64 {
        self.l2_l2_sq.sqrt()
    }
    pub fn l2_l2_dr(&self) -> f64 {
        self.l2_l2_dr_sq.sqrt()
    }
    pub fn l2_l2_over_r(&self) -> f64 {
        self.l2_l2_over_r_sq.sqrt()
    }
    pub fn l2_l2_phi_dr(&self) -> f64 {
        self.l2_l2_phi_dr_sq.sqrt()
    }
    pub fn l2_l2_phi_over_r(&self) -> f64 {
        self.l2_l2_phi_over_r_sq.sqrt()
    }
    pub fn l2_linf_phi(&self) -> f64 {
        self.l2_linf_phi_sq.sqrt()
    }

    /// The norms in a fixed order, for comparisons.
    pub fn norms(&self) -> [f64; 7] {
        [
            self.linf_l2,
            self.l2_l2(),
            self.l2_l2_dr(),
            self.l2_l2_over_r(),
            self.l2_l2_phi_dr(),
            self.l2_l2_phi_over_r(),
            self.l2_linf_phi(),
        ]
    }
}

/// Scalar trapezoid accumulator for weighted forcing norms.
#[derive(Debug, Clone, Copy, Default)]
struct Trapezoid {
    total: f64,
    last: Option<(f64, f64)>,
}

impl Trapezoid {
    fn push(&mut self, t: f64, v: f64) {
        if let Some((tp, vp)) = self.last {
            self.total += 0.5 * (t - tp) * (v + vp);
        }
        self.last = Some((t, v));
    }
}

/// Output of one linear run.
#[derive(Debug, Clone)]
pub struct LinearRun {
    pub final_state: CVec,
    pub ledger: SpaceTimeLedger,
    pub samples: Vec<LedgerSample>,
    /// `∫ 𝓔²‖r h₁‖²` and `∫ 𝓔²‖(|g| + r|g'|) h₂‖²`.
    pub forcing_sq: (f64, f64),
    /// `‖f(t)‖` after every step, starting with the initial value.
    pub l2_history: Vec<(f64, f64)>,
}

/// Integrates from `t = 0` to `horizon` in `steps` equal steps, tracking the
/// ledger with weight rate `rate` and, when `with_stream`, the stream function.
pub fn evolve(
    op: &OperatorBundle,
    grid: &RadialGrid,
    init: &CVec,
    forcing: &ForcingSpec,
    horizon: f64,
    steps: usize,
    rate: f64,
    with_stream: bool,
) -> Result<LinearRun> {
    if steps == 0 || !(horizon > 0.0) {
        return Err(domain("horizon and step count must be positive"));
    }
    let dt = horizon / steps as f64;
    let stepper = LinearStepper::new(op, dt)?;
    let mut f = init.clone();
    let mut ledger = SpaceTimeLedger::new(rate);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut fa = Trapezoid::default();
    let mut fb = Trapezoid::default();
    let mut history = Vec::with_capacity(steps + 1);
    let record = |t: f64, f: &CVec, ledger: &mut SpaceTimeLedger, samples: &mut Vec<LedgerSample>, fa: &mut Trapezoid, fb: &mut Trapezoid| -> Result<()> {
        let phi = if with_stream { Some(op.solve_delta(f)?) } else { None };
        let s = LedgerSample::of(grid, t, f, phi.as_ref());
        ledger.push(s);
        samples.push(s);
        if !forcing.is_zero() {
            let w = (2.0 * rate * t).exp();
            let (a, b) = forcing.norms_sq(grid, t);
            fa.push(t, w * a);
            fb.push(t, w * b);
        }
        Ok(())
    };
    record(0.0, &f, &mut ledger, &mut samples, &mut fa, &mut fb)?;
    history.push((0.0, grid.l2(&f)));
    for i in 0..steps {
        let t = i as f64 * dt;
        f = stepper.step(grid, &f, forcing, t)?;
        let t1 = (i + 1) as f64 * dt;
        record(t1, &f, &mut ledger, &mut samples, &mut fa, &mut fb)?;
        history.push((t1, grid.l2(&f)));
    }
    Ok(LinearRun {
        final_state: f,
        ledger,
        samples,
        forcing_sq: (fa.total, fb.total),
        l2_history: history,
    })
}

/// Fitted tail decay of `‖f(t)‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    /// Set when the norm underflowed and the window was cut short.
    pub shortened: bool,
}

/// Norm below which samples are treated as underflowed.
const UNDERFLOW: f64 = 1e-250;

/// Least-squares exponential rate of `‖f(t)‖` over `[horizon/2, horizon]`.
pub fn measure_decay_rate(params: &FlowParams, k: i64, grid: &RadialGrid, init: &ModeField, horizon: f64, steps: usize) -> Result<DecayFit> {
    let op = assemble_lnu(params, k, grid)?;
    let run = evolve(&op, grid, &init.values, &ForcingSpec::none(grid), horizon, steps, 0.0, false)?;
    fit_tail(&run.l2_history, horizon)
}

pub fn fit_tail(history: &[(f64, f64)], horizon: f64) -> Result<DecayFit> {
    let n0 = history.first().map_or(0.0, |h| h.1);
    if n0 == 0.0 {
        return Err(precondition("initial state is zero"));
    }
    let mut end = horizon;
    let mut shortened = false;
    if let Some(&(t, _)) = history.iter().find(|(_, v)| *v <= UNDERFLOW * n0) {
        end = t;
        shortened = true;
    }
    let start = 0.5 * end;
    let window: Vec<(f64, f64)> = history
        .iter()
        .filter(|(t, v)| *t >= start && *t <= end && *v > UNDERFLOW * n0)
        .map(|&(t, v)| (t, v.ln()))
        .collect();
    let (slope, _, r_squared) = fit_line(&window)?;
    Ok(DecayFit {
        rate: -slope,
        r_squared,
        window: (start, end),
        shortened,
    })
}

/// Which space-time estimate applies to a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `νk² ≤ |B|`: enhanced dissipation dominates.
    Enhanced,
    /// `νk² ≥ |B|`: plain diffusion dominates.
    Diffusive,
}

impl Regime {
    pub fn of(params: &FlowParams, k: i64) -> Self {
        if params.nu * (k * k) as f64 <= params.b.abs() {
            Regime::Enhanced
        } else {
            Regime::Diffusive
        }
    }
}

/// Left and right sides of a space-time estimate for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeReport {
    pub regime: Regime,
    pub lhs_terms: Vec<(String, f64)>,
    pub rhs_terms: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, defined as 0 when both vanish.
    pub ratio: f64,
    pub ledger: SpaceTimeLedger,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn report(regime: Regime, lhs_terms: Vec<(&str, f64)>, rhs_terms: Vec<(&str, f64)>, ledger: SpaceTimeLedger) -> SpacetimeReport {
    let lhs = lhs_terms.iter().map(|t| t.1).sum();
    let rhs = rhs_terms.iter().map(|t| t.1).sum();
    SpacetimeReport {
        regime,
        lhs_terms: lhs_terms.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
        rhs_terms: rhs_terms.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
        lhs,
        rhs,
        ratio: ratio(lhs, rhs),
        ledger,
    }
}

/// Integration settings shared by the space-time checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLength {
    pub horizon: f64,
    pub steps: usize,
}

/// Vorticity space-time estimate in the regime selected by `regime`.
pub fn verify_spacetime_vorticity(
    params: &FlowParams,
    k: i64,
    grid: &RadialGrid,
    init: &CVec,
    forcing: &ForcingSpec,
    weight: WeightParams,
    regime: Regime,
    run: RunLength,
) -> Result<SpacetimeReport> {
    if Regime::of(params, k) != regime {
        return Err(precondition(format!("mode k = {k} is not in the {regime:?} regime")));
    }
    let op = assemble_lnu(params, k, grid)?;
    let rate = weight.rate(params, k);
    let out = evolve(&op, grid, init, forcing, run.horizon, run.steps, rate, true)?;
    let l = &out.ledger;
    let nu = params.nu;
    let kf = (k as f64).abs();
    let b = params.b.abs();
    let aspect = params.aspect;
    let (h1_sq, h2_sq) = out.forcing_sq;
    let w0 = grid.l2(init);
    match regime {
        Regime::Enhanced => {
            let lhs = vec![
                ("N1", l.linf_l2),
                ("N2", (nu * kf * kf).powf(1.0 / 6.0) * b.cbrt() / aspect * l.l2_l2()),
                ("N3", nu.sqrt() * l.l2_l2_dr() + (nu * kf * kf).sqrt() * l.l2_l2_over_r()),
                ("N4", b.sqrt() / (aspect * aspect) * (kf * l.l2_l2_phi_dr() + kf * kf * l.l2_l2_phi_over_r())),
            ];
            let i1 = w0 + aspect.powi(-2) * aspect.ln().powf(-1.5) * grid.l2_rpow(init, 2.0) + aspect.powi(3) * grid.l2_rpow(init, -3.0);
            let i2 = (nu / (kf * b)).cbrt() * aspect * grid.l2(&grid.differentiate(init));
            let i3 = aspect * grid.l2_over_r(init) * (nu * kf * kf / b).powf(2.0 / 3.0);
            let rhs = vec![
                ("I1", i1),
                ("I2", i2),
                ("I3", i3),
                ("F1", nu.powf(-1.0 / 6.0) * (kf * b).powf(-1.0 / 3.0) * h1_sq.sqrt()),
                ("F2", nu.powf(-0.5) * h2_sq.sqrt()),
            ];
            Ok(report(regime, lhs, rhs, out.ledger))
        }
        Regime::Diffusive => {
            let lhs = vec![
                ("sup", l.linf_l2),
                ("dr", nu.sqrt() * l.l2_l2_dr()),
                ("over_r", (nu * kf * kf).sqrt() * l.l2_l2_over_r()),
                (
                    "stream",
                    (nu * kf * kf).sqrt() / (aspect * aspect) * (kf * l.l2_l2_phi_dr() + kf * kf * l.l2_l2_phi_over_r()),
                ),
            ];
            let rhs = vec![("init", w0), ("F1", nu.powf(-0.5) * h1_sq.sqrt() / kf), ("F2", nu.powf(-0.5) * h2_sq.sqrt())];
            Ok(report(regime, lhs, rhs, out.ledger))
        }
    }
}

/// Temperature estimates for the homogeneous part, the forced part and the
/// full solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureReport {
    pub regime: Regime,
    /// Homogeneous part against its initial data.
    pub homogeneous: SpacetimeReport,
    /// Zero-data forced part against its forcing.
    pub forced: SpacetimeReport,
    /// Full solution against initial data plus forcing.
    pub full: SpacetimeReport,
    /// Every ledger norm of the full run is at most the sum of the parts.
    pub triangle_ok: bool,
}

type Terms = Vec<(&'static str, f64)>;

/// Squared-form estimates are compared through square roots of both sides.
fn temperature_sides(params: &FlowParams, k: i64, regime: Regime, l: &SpaceTimeLedger, init_l2: f64, forcing_sq: (f64, f64)) -> (Terms, Terms) {
    let nu = params.nu;
    let kf = (k as f64).abs();
    let b = params.b.abs();
    let enh = params.enhanced_rate(k);
    match regime {
        Regime::Enhanced => {
            let lhs_sq = l.linf_l2.powi(2) + enh * l.l2_l2_sq + nu * l.l2_l2_dr_sq + nu * kf * kf * l.l2_l2_over_r_sq;
            let rhs_sq = init_l2.powi(2) + (nu * kf * kf).powf(-1.0 / 3.0) * b.powf(-2.0 / 3.0) * forcing_sq.0 + forcing_sq.1 / nu;
            (vec![("lhs", lhs_sq.sqrt())], vec![("rhs", rhs_sq.sqrt())])
        }
        Regime::Diffusive => (
            vec![
                ("sup", l.linf_l2),
                ("dr", nu.sqrt() * l.l2_l2_dr()),
                ("over_r", (nu * kf * kf).sqrt() * l.l2_l2_over_r()),
            ],
            vec![
                ("init", init_l2),
                ("F1", nu.powf(-0.5) * forcing_sq.0.sqrt() / kf),
                ("F2", nu.powf(-0.5) * forcing_sq.1.sqrt()),
            ],
        ),
    }
}

pub fn verify_spacetime_temperature(
    params: &FlowParams,
    k: i64,
    grid: &RadialGrid,
    init: &CVec,
    forcing: &ForcingSpec,
    weight: WeightParams,
    regime: Regime,
    run: RunLength,
) -> Result<TemperatureReport> {
    if Regime::of(params, k) != regime {
        return Err(precondition(format!("mode k = {k} is not in the {regime:?} regime")));
    }
    let op = assemble_lnu(params, k, grid)?;
    let rate = weight.rate(params, k);
    let zero = CVec::zeros(grid.n());
    let none = ForcingSpec::none(grid);
    let lin = evolve(&op, grid, init, &none, run.horizon, run.steps, rate, false)?;
    let nl = evolve(&op, grid, &zero, forcing, run.horizon, run.steps, rate, false)?;
    let full = evolve(&op, grid, init, forcing, run.horizon, run.steps, rate, false)?;
    let init_l2 = grid.l2(init);
    let build = |l: &SpaceTimeLedger, i: f64, fsq: (f64, f64)| {
        let (lhs, rhs) = temperature_sides(params, k, regime, l, i, fsq);
        report(regime, lhs, rhs, l.clone())
    };
    let triangle_ok = full
        .ledger
        .norms()
        .iter()
        .zip(lin.ledger.norms().iter().zip(nl.ledger.norms().iter()))
        .all(|(f, (a, b))| *f <= a + b + 1e-9 * (1.0 + a + b));
    Ok(TemperatureReport {
        regime,
        homogeneous: build(&lin.ledger, init_l2, (0.0, 0.0)),
        forced: build(&nl.ledger, 0.0, nl.forcing_sq),
        full: build(&full.ledger, init_l2, full.forcing_sq),
        triangle_ok,
    })
}
