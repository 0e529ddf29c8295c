//! Configuration, parameter sweeps, scaling fits, threshold bisection and
//! report output.

pub mod config;
pub mod fit;
pub mod report;
pub mod sweep;
pub mod threshold;

pub use config::{Experiment, GridSpec, Options, RunConfig, SweepSpec, SweepVariable};
pub use fit::{fit_scaling, lookup};
pub use report::{emit_report, parse_ndjson, Format};
pub use sweep::{experiment_config, record, run_point, run_sweep, run_sweep_in_order, summarize_simulation, PointResult};
pub use threshold::{bisect, threshold_bisect, threshold_scan, BisectOutcome, Bracket, ThresholdResult};
