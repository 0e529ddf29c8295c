use serde_json::Value;

use crate::analysis::fit::{fit_power_law, ScalingFit};
use crate::error::Result;

/// Looks up a dotted path such as `report.worst.0` in a record.
pub fn lookup<'a>(record: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(record, |v, key| match v {
        Value::Object(m) => m.get(key),
        Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

/// Log-log least squares of `y_field` against `x_field` over successful
/// records. Pairs that are missing or nonpositive are dropped and counted.
pub fn fit_scaling(records: &[Value], x_field: &str, y_field: &str) -> Result<ScalingFit> {
    let mut missing = 0;
    let mut data = Vec::new();
    for r in records {
        if r.get("status").and_then(Value::as_str).is_some_and(|s| s != "ok") {
            missing += 1;
            continue;
        }
        match (lookup(r, x_field).and_then(Value::as_f64), lookup(r, y_field).and_then(Value::as_f64)) {
            (Some(x), Some(y)) => data.push((x, y)),
            _ => missing += 1,
        }
    }
    let mut fit = fit_power_law(&data)?;
    fit.dropped += missing;
    Ok(fit)
}
