mod common;

use std::process::Command;

use couette::harness::report::{write_ndjson, write_plotdata};
use couette::harness::{fit_scaling, run_sweep, run_sweep_in_order, threshold_bisect, Experiment, RunConfig, SweepSpec, SweepVariable};

const NUS: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

fn gap_sweep() -> RunConfig {
    let mut c = RunConfig::default_for(Experiment::Gap);
    c.sweep = Some(SweepSpec {
        variable: SweepVariable::Nu,
        values: NUS.to_vec(),
    });
    c
}

fn ndjson(records: &[serde_json::Value]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_ndjson(records, &mut buf).unwrap();
    buf
}

#[test]
fn gap_sweep_gives_one_positive_record_per_point() {
    let c = gap_sweep();
    let recs = run_sweep(&c, 2).unwrap();
    assert_eq!(recs.len(), 5);
    for (r, nu) in recs.iter().zip(NUS) {
        assert_eq!(r["status"], "ok");
        assert_eq!(r["x"].as_f64().unwrap(), nu);
        assert_eq!(r["config_hash"], c.hash());
        assert!(r["primary"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn reruns_and_shuffled_orders_are_byte_identical() {
    let mut c = RunConfig::default_for(Experiment::Accretivity);
    c.grid.n = 32;
    c.options.trials = 50;
    c.options.k_list = vec![1, 3];
    c.seed = 17;
    c.sweep = Some(SweepSpec {
        variable: SweepVariable::Nu,
        values: vec![1e-2, 1e-3, 1e-4, 3e-3],
    });
    let a = ndjson(&run_sweep(&c, 3).unwrap());
    let b = ndjson(&run_sweep(&c, 1).unwrap());
    let shuffled = ndjson(&run_sweep_in_order(&c, &[2, 0, 3, 1]).unwrap());
    let reversed = ndjson(&run_sweep_in_order(&c, &[3, 2, 1, 0]).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, shuffled);
    assert_eq!(a, reversed);
}

#[test]
fn gap_scaling_exponent_from_default_sweep() {
    let recs = run_sweep(&gap_sweep(), 1).unwrap();
    let fit = fit_scaling(&recs, "x", "primary").unwrap();
    let oracle = common::loglog_slope(&NUS, &recs.iter().map(|r| r["primary"].as_f64().unwrap()).collect::<Vec<_>>());
    assert!((fit.slope - oracle).abs() < 1e-12);
    println!("psi slope {:.4} (r² {:.4})", fit.slope, fit.r_squared);
    assert!((0.25..=0.41).contains(&fit.slope), "psi slope {:.4} outside [0.25, 0.41]", fit.slope);
}

#[test]
fn plotdata_of_gap_sweep_has_two_columns_and_hash() {
    let c = gap_sweep();
    let recs = run_sweep(&c, 1).unwrap();
    let mut buf = Vec::new();
    write_plotdata(&recs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().take_while(|l| l.starts_with('#')).any(|l| l.contains(&c.hash())));
    assert!(text.lines().any(|l| l == "# nu psi"));
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|l| l.split_whitespace().count() == 2));
}

fn cli(args: &[&str], dir: &std::path::Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_couette"))
        .args(args)
        .current_dir(dir)
        .env_remove("COUETTE_OUTPUT_DIR")
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let base = r#""params": {"nu": 0.01, "b": 1.0, "aspect": 2.0, "k_max": 4}, "grid": {"n": 24}"#;

    let empty = write(
        "empty.json",
        &format!(r#"{{{base}, "experiment": "gap", "sweep": {{"variable": "nu", "values": []}}}}"#),
    );
    let (code, err) = cli(&["gap", "--config", &empty, "--out", "o"], dir.path());
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(dir.path().join("o/gap.ndjson")).unwrap(), "");

    let unknown = write("unknown.json", &format!(r#"{{{base}, "experiment": "spectral"}}"#));
    assert_eq!(cli(&["gap", "--config", &unknown], dir.path()).0, 2);
    assert_eq!(cli(&["gap", "--format", "xml"], dir.path()).0, 2);

    let failing = write("failing.json", &format!(r#"{{{base}, "experiment": "gap", "options": {{"lambda_steps": 8}}}}"#));
    assert_eq!(cli(&["gap", "--config", &failing, "--out", "o"], dir.path()).0, 3);

    let strict = write(
        "strict.json",
        &format!(r#"{{{base}, "experiment": "grid_check", "tolerances": {{"grid": 1e-30}}}}"#),
    );
    assert_eq!(cli(&["grid-check", "--config", &strict, "--out", "o"], dir.path()).0, 4);

    let (code, err) = cli(&["grid-check", "--out", "o", "--format", "csv", "--seed", "3", "--jobs", "1"], dir.path());
    assert_eq!(code, 0, "{err}");
    assert!(dir.path().join("o/grid_check.csv").exists());
}

#[test]
fn cli_report_converts_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gap.json");
    std::fs::write(&cfg, serde_json::to_string(&gap_sweep()).unwrap()).unwrap();
    let (code, err) = cli(&["gap", "--config", cfg.to_str().unwrap(), "--out", "o"], dir.path());
    assert_eq!(code, 0, "{err}");
    let out = Command::new(env!("CARGO_BIN_EXE_couette"))
        .args(["report", "o/gap.ndjson", "--format", "plotdata", "--fit-x", "x", "--fit-y", "report.psi"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let fit: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(fit["slope"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("o/gap.dat").exists());
}

/// Full-simulation bisection at the default desk-scale point; takes tens of
/// minutes on one core. Run with `cargo test --release -- --ignored`.
#[test]
#[ignore]
fn observed_threshold_lies_above_the_sufficient_amplitude() {
    let mut c = RunConfig::default_for(Experiment::Threshold);
    c.params.a = 1.0;
    c.sweep = Some(SweepSpec {
        variable: SweepVariable::Nu,
        values: vec![1e-2, 3e-3, 1e-3],
    });
    let r = threshold_bisect(&c, c.options.eps_range, 0).unwrap();
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
    assert!(r.bracket_width <= 0.05);
    for (eps, rhs) in r.eps_star.iter().zip(&r.theorem_rhs) {
        let eps = eps.expect("bracketed");
        assert!(eps >= *rhs, "eps* {eps:e} below {rhs:e}");
    }
}
