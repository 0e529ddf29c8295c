use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::elliptic::verify_elliptic_estimates;
use crate::analysis::gap::{check_accretivity, semigroup_bound_check, spectral_gap};
use crate::analysis::resolvent::{default_lambda_grid, worst_ratios};
use crate::error::{Error, Result};
use crate::evolution::{measure_decay_rate, verify_spacetime_temperature, verify_spacetime_vorticity, ForcingSpec, Regime, RunLength, WeightParams};
use crate::field::{ModeField, Rep};
use crate::grid::{CVec, RadialGrid};
use crate::random::DirichletSampler;
use crate::sim::{run_stability_experiment, threshold_rhs, ExperimentConfig, ExperimentOutcome};

use super::config::{Experiment, RunConfig};

/// Result of one experiment at one parameter point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub primary_name: &'static str,
    pub primary: f64,
    /// Whether the point meets the experiment's own check, when it has one.
    pub pass: Option<bool>,
    pub report: Value,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn point(primary_name: &'static str, primary: f64, pass: Option<bool>, report: Value) -> PointResult {
    PointResult {
        primary_name,
        primary,
        pass,
        report,
    }
}

/// Sine bump in the weighted variable, the default decay initial condition.
pub fn bump_profile(grid: &RadialGrid) -> CVec {
    let span = grid.aspect() - 1.0;
    let mut f = grid.sample(|r| (std::f64::consts::PI * (r - 1.0) / span).sin());
    let n = f.len();
    f[0] = 0.0.into();
    f[n - 1] = 0.0.into();
    f
}

fn grid_check(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let n = grid.n();
    let (a, b) = (1.0_f64, grid.aspect());
    let deg = 2 * n - 3;
    let exact = (b.powi(deg as i32 + 1) - a.powi(deg as i32 + 1)) / (deg as f64 + 1.0);
    let vals: Vec<f64> = grid.nodes().iter().map(|r| r.powi(deg as i32)).collect();
    let quad_err = (grid.integrate(&vals) - exact).abs() / exact.abs();
    let f = grid.sample(|r| (2.0 * r).sin());
    let df = grid.differentiate(&f);
    let deriv_err = grid
        .nodes()
        .iter()
        .zip(df.iter())
        .map(|(r, d)| (d.re - 2.0 * (2.0 * r).cos()).abs())
        .fold(0.0, f64::max);
    let tol = cfg.tolerance("grid", 1e-10);
    let worst = quad_err.max(deriv_err);
    Ok(point(
        "max_error",
        worst,
        Some(worst < tol),
        json!({ "n": n, "quadrature_degree": deg, "quadrature_rel_error": quad_err, "derivative_max_error": deriv_err }),
    ))
}

fn elliptic(cfg: &RunConfig) -> Result<PointResult> {
    let coarse = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let fine = RadialGrid::build(cfg.params.aspect, 2 * cfg.grid.n)?;
    let o = &cfg.options;
    let a = verify_elliptic_estimates(&coarse, &o.k_list, o.trials, cfg.seed)?;
    let b = verify_elliptic_estimates(&fine, &o.k_list, o.trials, cfg.seed)?;
    let mut worst: f64 = 0.0;
    for (x, y) in a.per_k.iter().zip(&b.per_k) {
        for (u, v) in x.as_array().iter().zip(y.as_array()) {
            worst = worst.max((u - v).abs() / v.abs().max(f64::MIN_POSITIVE));
        }
    }
    let (u, v) = (a.axisymmetric.sup_bound, b.axisymmetric.sup_bound);
    worst = worst.max((u - v).abs() / v.abs().max(f64::MIN_POSITIVE));
    let tol = cfg.tolerance("elliptic_refinement", 0.05);
    Ok(point(
        "max_refinement_change",
        worst,
        Some(worst < tol),
        json!({ "coarse": to_value(&a)?, "fine": to_value(&b)? }),
    ))
}

fn resolvent(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let lambdas = default_lambda_grid(cfg.params.aspect, 41);
    let mut smp = DirichletSampler::new(cfg.seed);
    let trials = cfg.options.trials.min(20);
    let forcings: Vec<CVec> = (0..trials).map(|_| smp.profile(&grid)).collect();
    let p = worst_ratios(&cfg.params, cfg.options.k, &grid, &lambdas, &forcings, true)?;
    let primary = p.worst.iter().copied().fold(0.0, f64::max);
    Ok(point("max_worst_ratio", primary, None, to_value(&p)?))
}

fn gap(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let g = spectral_gap(&cfg.params, cfg.options.k, &grid, None, cfg.options.lambda_steps)?;
    Ok(point("psi", g.psi, Some(g.psi > 0.0), to_value(&g)?))
}

fn accretivity(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let trials = cfg.options.trials.max(50);
    let reports = cfg
        .options
        .k_list
        .iter()
        .map(|&k| check_accretivity(&cfg.params, k, &grid, trials, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let defect = reports.iter().map(|r| r.max_identity_defect).fold(0.0, f64::max);
    let tol = cfg.tolerance("accretivity", 1e-10);
    let pass = defect < tol && reports.iter().all(|r| r.resolvent_ok && r.min_normalized_real_part >= 0.0);
    Ok(point("max_identity_defect", defect, Some(pass), to_value(&reports)?))
}

fn semigroup(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let g = spectral_gap(&cfg.params, cfg.options.k, &grid, None, cfg.options.lambda_steps)?;
    let rep = semigroup_bound_check(&cfg.params, cfg.options.k, &grid, &cfg.options.t_grid, &g)?;
    let tol = cfg.tolerance("semigroup_margin", 1e-8);
    Ok(point("min_margin", rep.min_margin, Some(rep.min_margin >= tol), to_value(&rep)?))
}

fn decay(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let k = cfg.options.k;
    let g = spectral_gap(&cfg.params, k, &grid, None, cfg.options.lambda_steps)?;
    let horizon = cfg.options.horizon.unwrap_or(cfg.options.horizon_psi / g.psi);
    let init = ModeField::new(k, bump_profile(&grid), Rep::Weighted);
    let fit = measure_decay_rate(&cfg.params, k, &grid, &init, horizon, cfg.options.decay_steps)?;
    let ratio = fit.rate / g.psi;
    let (lo, hi) = (cfg.tolerance("decay_low", 0.9), cfg.tolerance("decay_high", 1.5));
    Ok(point(
        "rate",
        fit.rate,
        Some(ratio >= lo && ratio <= hi),
        json!({ "psi": g.psi, "horizon": horizon, "rate_over_psi": ratio, "fit": to_value(&fit)? }),
    ))
}

fn spacetime(cfg: &RunConfig) -> Result<PointResult> {
    let grid = RadialGrid::build(cfg.params.aspect, cfg.grid.n)?;
    let k = cfg.options.k;
    let p = &cfg.params;
    let regime = Regime::of(p, k);
    let g = spectral_gap(p, k, &grid, None, cfg.options.lambda_steps)?;
    let horizon = cfg.options.horizon.unwrap_or(10.0 / g.psi);
    let run = RunLength {
        horizon,
        steps: cfg.options.decay_steps,
    };
    let weight = WeightParams::new(cfg.options.c_prime.unwrap_or(0.0))?;
    let init = DirichletSampler::new(cfg.seed).profile(&grid);
    let none = ForcingSpec::none(&grid);
    let w = verify_spacetime_vorticity(p, k, &grid, &init, &none, weight, regime, run)?;
    let t = verify_spacetime_temperature(p, k, &grid, &init, &none, weight, regime, run)?;
    let strip = |mut v: Value| {
        if let Some(o) = v.as_object_mut() {
            o.remove("ledger");
        }
        v
    };
    Ok(point(
        "vorticity_ratio",
        w.ratio,
        Some(w.ratio.is_finite() && t.triangle_ok),
        json!({
            "regime": to_value(&regime)?,
            "horizon": horizon,
            "vorticity": strip(to_value(&w)?),
            "temperature_ratio": t.full.ratio,
            "temperature_homogeneous_ratio": t.homogeneous.ratio,
            "triangle_ok": t.triangle_ok,
        }),
    ))
}

/// Experiment settings of a `simulate` point.
pub fn experiment_config(cfg: &RunConfig) -> ExperimentConfig {
    let o = &cfg.options;
    let thr = threshold_rhs(&cfg.params, o.eps0, o.eps1)[0];
    let mut e = ExperimentConfig::new(cfg.params, cfg.grid.n, if o.epsilon > 0.0 { o.epsilon } else { thr });
    e.eps0 = o.eps0;
    e.eps1 = o.eps1;
    e.stability_factor = o.stability_factor;
    e.c_prime = o.c_prime;
    e.horizon = o.horizon;
    e.dt = o.dt;
    e.init = o.init;
    e
}

fn simulate(cfg: &RunConfig) -> Result<PointResult> {
    summarize_simulation(&run_stability_experiment(&experiment_config(cfg))?)
}

/// Sweep-record view of a finished stability experiment.
pub fn summarize_simulation(out: &ExperimentOutcome) -> Result<PointResult> {
    let stable = out.verdict.outcome == crate::sim::Outcome::Stable;
    let report = json!({
        "verdict": to_value(&out.verdict)?,
        "conditions": to_value(&out.conditions)?,
        "e_sum": out.ledger.e_sum,
        "h_sum": out.ledger.h_sum,
        "threshold_rhs": out.ledger.threshold_rhs,
        "c_prime": out.c_prime,
        "weight_rate": out.weight_rate,
        "psi": out.psi,
        "dt": out.dt,
        "steps": out.steps,
        "nonzero_decay": to_value(&out.nonzero_decay)?,
    });
    Ok(point("sup_energy_ratio", out.verdict.sup_energy_ratio, Some(stable), report))
}

/// Runs the configured experiment at one (already specialized) point.
pub fn run_point(cfg: &RunConfig) -> Result<PointResult> {
    match cfg.experiment {
        Experiment::GridCheck => grid_check(cfg),
        Experiment::Elliptic => elliptic(cfg),
        Experiment::Resolvent => resolvent(cfg),
        Experiment::Gap => gap(cfg),
        Experiment::Accretivity => accretivity(cfg),
        Experiment::Semigroup => semigroup(cfg),
        Experiment::Decay => decay(cfg),
        Experiment::Spacetime => spacetime(cfg),
        Experiment::Simulate => simulate(cfg),
        Experiment::Threshold => Err(Error::Config("threshold scans run through threshold_bisect".into())),
    }
}

/// Builds the NDJSON record of one point.
pub fn record(cfg: &RunConfig, hash: &str, index: usize, x: Option<f64>, result: Result<PointResult>) -> Value {
    let variable = cfg.sweep.as_ref().map(|s| s.variable.name());
    let mut rec = json!({
        "config_hash": hash,
        "experiment": cfg.experiment.name(),
        "index": index,
        "variable": variable,
        "x": x,
        "seed": cfg.seed,
    });
    let o = rec.as_object_mut().expect("object");
    match result {
        Ok(p) => {
            o.insert("status".into(), json!("ok"));
            o.insert("primary_name".into(), json!(p.primary_name));
            o.insert("primary".into(), json!(p.primary));
            o.insert("pass".into(), json!(p.pass));
            o.insert("report".into(), p.report);
        }
        Err(e) => {
            o.insert("status".into(), json!("error"));
            o.insert("error".into(), json!(e.to_string()));
        }
    }
    rec
}

fn evaluate(cfg: &RunConfig, hash: &str, index: usize, x: Option<f64>) -> Value {
    let point_cfg = match x {
        Some(v) => cfg.at(v),
        None => cfg.clone(),
    };
    record(cfg, hash, index, x, run_point(&point_cfg))
}

fn sort_records(records: &mut [Value]) {
    records.sort_by_key(|r| r["index"].as_u64().unwrap_or(u64::MAX));
}

/// One record per sweep point, ordered by sweep index. Points run on up to
/// `jobs` workers (`0` means all cores).
pub fn run_sweep(cfg: &RunConfig, jobs: usize) -> Result<Vec<Value>> {
    cfg.validate()?;
    if cfg.experiment == Experiment::Threshold {
        return Err(Error::Config("use threshold_bisect for threshold scans".into()));
    }
    let hash = cfg.hash();
    let points: Vec<(usize, Option<f64>)> = cfg.points().into_iter().enumerate().collect();
    let mut records = execute(&points, jobs, |&(i, x)| evaluate(cfg, &hash, i, x))?;
    sort_records(&mut records);
    Ok(records)
}

/// Runs points in the given order on one worker; the output is identical to
/// [`run_sweep`] for any permutation.
pub fn run_sweep_in_order(cfg: &RunConfig, order: &[usize]) -> Result<Vec<Value>> {
    cfg.validate()?;
    let hash = cfg.hash();
    let points = cfg.points();
    let mut records: Vec<Value> = order
        .iter()
        .map(|&i| {
            let x = *points.get(i).ok_or_else(|| Error::Config(format!("sweep index {i} out of range")))?;
            Ok(evaluate(cfg, &hash, i, x))
        })
        .collect::<Result<_>>()?;
    sort_records(&mut records);
    Ok(records)
}

#[cfg(feature = "parallel")]
pub(crate) fn execute<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn execute<T: Sync, R: Send>(items: &[T], _jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>> {
    Ok(items.iter().map(f).collect())
}
