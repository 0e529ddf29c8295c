use serde::{Deserialize, Serialize};

use crate::analysis::fit::fit_power_law;
use crate::error::{Error, Result};
use crate::sim::{run_stability_experiment, threshold_rhs, Outcome};

use super::config::{RunConfig, SweepVariable};
use super::sweep::{execute, experiment_config};

/// Largest accepted relative bracket width `(hi - lo)/hi`.
pub const BRACKET_WIDTH: f64 = 0.05;
/// Number of ×10 widenings tried on each end before giving up.
pub const MAX_WIDENINGS: usize = 3;

/// Bracket found for one viscosity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    /// Largest amplitude observed stable.
    pub lo: f64,
    /// Smallest amplitude observed unstable.
    pub hi: f64,
    pub evaluations: usize,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.hi
    }

    pub fn midpoint(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }
}

/// Outcome of bracketing: either a bracket or a reason why none was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BisectOutcome {
    Found(Bracket),
    Inconclusive(String),
}

/// Locates the flip of `stable` between `lo` and `hi` to relative width
/// [`BRACKET_WIDTH`], widening either end by ×10 up to [`MAX_WIDENINGS`] times.
pub fn bisect(lo: f64, hi: f64, mut stable: impl FnMut(f64) -> Result<bool>) -> Result<BisectOutcome> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut evals = 0;
    let mut check = |x: f64, evals: &mut usize| {
        *evals += 1;
        stable(x)
    };
    let mut widen = 0;
    while !check(lo, &mut evals)? {
        if widen == MAX_WIDENINGS {
            return Ok(BisectOutcome::Inconclusive(format!("unstable down to {lo:e}")));
        }
        hi = lo;
        lo /= 10.0;
        widen += 1;
    }
    widen = 0;
    while check(hi, &mut evals)? {
        if widen == MAX_WIDENINGS {
            return Ok(BisectOutcome::Inconclusive(format!("stable up to {hi:e}")));
        }
        lo = hi;
        hi *= 10.0;
        widen += 1;
    }
    while (hi - lo) / hi > BRACKET_WIDTH {
        let mid = (lo * hi).sqrt();
        if check(mid, &mut evals)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BisectOutcome::Found(Bracket { lo, hi, evaluations: evals }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub nu_values: Vec<f64>,
    /// Geometric bracket midpoint per viscosity, `None` when no flip was found.
    pub eps_star: Vec<Option<f64>>,
    pub brackets: Vec<BisectOutcome>,
    /// Exponent of `ε* ∝ ν^α`, when at least four viscosities bracketed.
    pub fitted_alpha: Option<f64>,
    /// Largest relative bracket width among found brackets.
    pub bracket_width: f64,
    /// `ε₀ν^{1/2}|B|^{1/2}R^{-2}` per viscosity.
    pub theorem_rhs: Vec<f64>,
    /// Whether the smallness conditions hold at `ε*`.
    pub conditions_at_star: Vec<Option<bool>>,
    pub inconclusive: bool,
}

/// Brackets the flip for every viscosity with a caller-supplied verdict
/// `stable(ν, ε)`; `eps_range` is absolute.
pub fn threshold_scan<F>(nu_values: &[f64], eps_range: (f64, f64), theorem_rhs: impl Fn(f64) -> f64, stable: F, jobs: usize) -> Result<ThresholdResult>
where
    F: Fn(f64, f64) -> Result<bool> + Sync + Send,
{
    let outcomes = execute(nu_values, jobs, |&nu| bisect(eps_range.0, eps_range.1, |e| stable(nu, e)))?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let eps_star: Vec<Option<f64>> = outcomes
        .iter()
        .map(|o| match o {
            BisectOutcome::Found(b) => Some(b.midpoint()),
            BisectOutcome::Inconclusive(_) => None,
        })
        .collect();
    let pairs: Vec<(f64, f64)> = nu_values.iter().zip(&eps_star).filter_map(|(n, e)| e.map(|e| (*n, e))).collect();
    let fitted_alpha = if pairs.len() >= crate::analysis::fit::MIN_POINTS {
        Some(fit_power_law(&pairs)?.slope)
    } else {
        None
    };
    let bracket_width = outcomes
        .iter()
        .filter_map(|o| match o {
            BisectOutcome::Found(b) => Some(b.width()),
            BisectOutcome::Inconclusive(_) => None,
        })
        .fold(0.0, f64::max);
    let theorem: Vec<f64> = nu_values.iter().map(|&n| theorem_rhs(n)).collect();
    let conditions_at_star = eps_star.iter().zip(&theorem).map(|(e, t)| e.map(|e| e <= *t)).collect();
    Ok(ThresholdResult {
        nu_values: nu_values.to_vec(),
        inconclusive: eps_star.iter().any(Option::is_none),
        eps_star,
        brackets: outcomes,
        fitted_alpha,
        bracket_width,
        theorem_rhs: theorem,
        conditions_at_star,
    })
}

/// Threshold scan driven by full simulations. `eps_range` is in units of the
/// vorticity threshold `ε₀ν^{1/2}|B|^{1/2}R^{-2}` at each viscosity.
pub fn threshold_bisect(cfg: &RunConfig, eps_range: (f64, f64), jobs: usize) -> Result<ThresholdResult> {
    let nus = match &cfg.sweep {
        Some(s) if s.variable == SweepVariable::Nu => s.values.clone(),
        Some(_) => return Err(Error::Config("threshold scans sweep over nu".into())),
        None => vec![cfg.params.nu],
    };
    let rhs = |nu: f64| {
        let mut p = cfg.params;
        p.nu = nu;
        threshold_rhs(&p, cfg.options.eps0, cfg.options.eps1)[0]
    };
    // Bracketing runs in threshold units so one range serves every viscosity.
    let mut result = threshold_scan(
        &nus,
        eps_range,
        |_| 1.0,
        |nu, s| {
            let mut c = cfg.clone();
            c.params.nu = nu;
            c.options.epsilon = s * rhs(nu);
            let out = run_stability_experiment(&experiment_config(&c))?;
            Ok(out.verdict.outcome == Outcome::Stable)
        },
        jobs,
    )?;
    for (i, &nu) in nus.iter().enumerate() {
        let t = rhs(nu);
        result.eps_star[i] = result.eps_star[i].map(|s| s * t);
        if let BisectOutcome::Found(b) = &mut result.brackets[i] {
            b.lo *= t;
            b.hi *= t;
        }
        result.theorem_rhs[i] = t;
        result.conditions_at_star[i] = result.eps_star[i].map(|e| e <= t);
    }
    let pairs: Vec<(f64, f64)> = nus.iter().zip(&result.eps_star).filter_map(|(n, e)| e.map(|e| (*n, e))).collect();
    result.fitted_alpha = if pairs.len() >= crate::analysis::fit::MIN_POINTS {
        Some(fit_power_law(&pairs)?.slope)
    } else {
        None
    };
    Ok(result)
}
