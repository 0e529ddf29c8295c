use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use couette::harness::report::{write_checkpoint, write_energy_csv};
use couette::harness::{
    emit_report, experiment_config, fit_scaling, parse_ndjson, record, run_sweep, summarize_simulation, threshold_bisect, BisectOutcome, Experiment, Format,
    RunConfig, ThresholdResult,
};
use couette::sim::{run_stability_experiment, Checkpoint};
use couette::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

/// Linear and nonlinear stability experiments for Taylor-Couette flow with
/// buoyancy.
#[derive(Parser)]
#[command(name = "couette", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; experiment defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config and COUETTE_OUTPUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores (overrides COUETTE_JOBS).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "ndjson")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Quadrature and differentiation accuracy of the radial grid.
    GridCheck(Common),
    /// Elliptic estimate constants and their refinement stability.
    EllipticVerify(Common),
    /// Worst resolvent ratios over the spectral parameter.
    ResolventSweep(Common),
    /// Spectral gap of the linearized operator.
    Gap(Common),
    /// Accretivity identity and resolvent bound.
    Accretivity(Common),
    /// Semigroup bound from the spectral gap.
    SemigroupBound(Common),
    /// Measured linear decay rate against the spectral gap.
    Decay(Common),
    /// Space-time estimates of the forced linear problem.
    Spacetime(Common),
    /// Nonlinear simulation with the stability energy ledger.
    Simulate(Common),
    /// Critical amplitude by bisection over a viscosity sweep.
    ThresholdScan(Common),
    /// Converts NDJSON records to another format, optionally fitting a power law.
    Report {
        /// NDJSON record file.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Dotted field path used as x in a log-log fit.
        #[arg(long, requires = "fit_y")]
        fit_x: Option<String>,
        /// Dotted field path used as y in a log-log fit.
        #[arg(long, requires = "fit_x")]
        fit_y: Option<String>,
    },
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::GridCheck(_) => Experiment::GridCheck,
            Command::EllipticVerify(_) => Experiment::Elliptic,
            Command::ResolventSweep(_) => Experiment::Resolvent,
            Command::Gap(_) => Experiment::Gap,
            Command::Accretivity(_) => Experiment::Accretivity,
            Command::SemigroupBound(_) => Experiment::Semigroup,
            Command::Decay(_) => Experiment::Decay,
            Command::Spacetime(_) => Experiment::Spacetime,
            Command::Simulate(_) => Experiment::Simulate,
            Command::ThresholdScan(_) => Experiment::Threshold,
            Command::Report { .. } => return None,
        })
    }

    fn common(&self) -> &Common {
        match self {
            Command::GridCheck(c)
            | Command::EllipticVerify(c)
            | Command::ResolventSweep(c)
            | Command::Gap(c)
            | Command::Accretivity(c)
            | Command::SemigroupBound(c)
            | Command::Decay(c)
            | Command::Spacetime(c)
            | Command::Simulate(c)
            | Command::ThresholdScan(c) => c,
            Command::Report { common, .. } => common,
        }
    }
}

/// Failure carrying the process exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Json(_) | Error::Io(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Failure(code, e.to_string())
    }
}

fn load_config(experiment: Experiment, common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default_for(experiment),
    };
    if cfg.experiment != experiment {
        return Err(Failure(
            EXIT_USAGE,
            format!("config is for '{}' but the subcommand runs '{}'", cfg.experiment.name(), experiment.name()),
        ));
    }
    cfg.apply_env();
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn jobs(common: &Common) -> usize {
    common
        .jobs
        .or_else(|| std::env::var(couette::harness::config::ENV_JOBS).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0)
}

/// Exit status implied by a record set: any failed point is a numerical
/// failure, any failed check is inconclusive.
fn status_of(records: &[Value]) -> u8 {
    if records.iter().any(|r| r["status"] != "ok") {
        EXIT_NUMERICAL
    } else if records.iter().any(|r| r["pass"] == false) {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

fn summarize(records: &[Value]) {
    for r in records {
        let x = r["x"]
            .as_f64()
            .map(|x| format!("{} = {x:e}", r["variable"].as_str().unwrap_or("x")))
            .unwrap_or_else(|| "base".into());
        match r["status"].as_str() {
            Some("ok") => eprintln!(
                "{x}: {} = {:e}, pass = {}",
                r["primary_name"].as_str().unwrap_or(""),
                r["primary"].as_f64().unwrap_or(f64::NAN),
                r["pass"]
            ),
            _ => eprintln!("{x}: error: {}", r["error"].as_str().unwrap_or("")),
        }
    }
}

fn run_experiment(cfg: &RunConfig, common: &Common) -> Result<u8, Failure> {
    let records = run_sweep(cfg, jobs(common))?;
    summarize(&records);
    let path = emit_report(&records, common.format, &cfg.output_dir, cfg.experiment.name())?;
    eprintln!("wrote {}", path.display());
    Ok(status_of(&records))
}

fn run_simulate(cfg: &RunConfig, common: &Common) -> Result<u8, Failure> {
    if cfg.sweep.is_some() {
        return run_experiment(cfg, common);
    }
    let mut ec = experiment_config(cfg);
    ec.series_stride = 50;
    let result = run_stability_experiment(&ec);
    let outcome = result.as_ref().ok();
    let rec = record(
        cfg,
        &cfg.hash(),
        0,
        None,
        result.as_ref().map_err(|e| Error::Precondition(e.to_string())).and_then(summarize_simulation),
    );
    let records = vec![rec];
    summarize(&records);
    let dir = &cfg.output_dir;
    let path = emit_report(&records, common.format, dir, "simulate")?;
    eprintln!("wrote {}", path.display());
    if let Some(out) = outcome {
        let energy = dir.join("energy.csv");
        write_energy_csv(out, std::io::BufWriter::new(std::fs::File::create(&energy).map_err(Error::from)?))?;
        eprintln!("wrote {}", energy.display());
        if let Some(state) = &out.final_state {
            let cp = dir.join("checkpoint.json");
            write_checkpoint(&cp, &Checkpoint::of(state))?;
            eprintln!("wrote {}", cp.display());
        }
    }
    Ok(status_of(&records))
}

fn threshold_records(cfg: &RunConfig, result: &ThresholdResult) -> Vec<Value> {
    let hash = cfg.hash();
    result
        .nu_values
        .iter()
        .enumerate()
        .map(|(i, &nu)| {
            let base = json!({"config_hash": hash, "experiment": "threshold", "index": i, "variable": "nu", "x": nu, "seed": cfg.seed});
            let mut rec = base.as_object().cloned().unwrap_or_default();
            match (&result.brackets[i], result.eps_star[i]) {
                (BisectOutcome::Found(b), Some(eps)) => {
                    rec.insert("status".into(), json!("ok"));
                    rec.insert("primary_name".into(), json!("eps_star"));
                    rec.insert("primary".into(), json!(eps));
                    // Sufficiency: the proven-stable amplitude lies below the observed flip.
                    rec.insert("pass".into(), json!(eps >= result.theorem_rhs[i]));
                    rec.insert("report".into(), json!({"bracket": b, "theorem_rhs": result.theorem_rhs[i]}));
                }
                (outcome, _) => {
                    let why = match outcome {
                        BisectOutcome::Inconclusive(w) => w.clone(),
                        BisectOutcome::Found(_) => "no flip".into(),
                    };
                    rec.insert("status".into(), json!("inconclusive"));
                    rec.insert("error".into(), json!(why));
                }
            }
            Value::Object(rec)
        })
        .collect()
}

fn run_threshold(cfg: &RunConfig, common: &Common) -> Result<u8, Failure> {
    let result = threshold_bisect(cfg, cfg.options.eps_range, jobs(common))?;
    let records = threshold_records(cfg, &result);
    summarize(&records);
    std::fs::create_dir_all(&cfg.output_dir).map_err(Error::from)?;
    let full = cfg.output_dir.join("threshold.json");
    std::fs::write(&full, serde_json::to_vec_pretty(&result).map_err(Error::from)?).map_err(Error::from)?;
    let path = emit_report(&records, common.format, &cfg.output_dir, "threshold")?;
    eprintln!("alpha = {:?}, widest bracket = {:.3}", result.fitted_alpha, result.bracket_width);
    eprintln!("wrote {} and {}", full.display(), path.display());
    Ok(if result.inconclusive { EXIT_INCONCLUSIVE } else { status_of(&records) })
}

fn run_report(input: &PathBuf, common: &Common, fit: Option<(&str, &str)>) -> Result<u8, Failure> {
    let file = std::fs::File::open(input).map_err(Error::from)?;
    let records = parse_ndjson(std::io::BufReader::new(file))?;
    if records.is_empty() {
        return Err(Failure(EXIT_USAGE, format!("{} has no records", input.display())));
    }
    let dir = common.out.clone().unwrap_or_else(|| input.parent().map(PathBuf::from).unwrap_or_default());
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let path = emit_report(&records, common.format, &dir, stem)?;
    eprintln!("wrote {}", path.display());
    if let Some((x, y)) = fit {
        let f = fit_scaling(&records, x, y)?;
        println!(
            "{}",
            json!({"x": x, "y": y, "slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared, "dropped": f.dropped})
        );
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let common = cli.command.common().clone();
    if let Command::Report { input, fit_x, fit_y, .. } = &cli.command {
        let fit = fit_x.as_deref().zip(fit_y.as_deref());
        return run_report(input, &common, fit);
    }
    let experiment = cli.command.experiment().expect("experiment subcommand");
    let cfg = load_config(experiment, &common)?;
    match experiment {
        Experiment::Simulate => run_simulate(&cfg, &common),
        Experiment::Threshold => run_threshold(&cfg, &common),
        _ => run_experiment(&cfg, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
