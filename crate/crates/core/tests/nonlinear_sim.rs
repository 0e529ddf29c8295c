use num_complex::Complex64;

use couette::evolution::CrankNicolson;
use couette::operators::assemble;
use couette::sim::{
    buoyancy_rhs, init_profiles, run_stability_experiment, temperature_nonlinear, threshold_rhs, vorticity_nonlinear, zero_mode_rhs, Checkpoint,
    ExperimentConfig, InitFamily, Outcome, SimState, Simulator, TermSwitches,
};
use couette::{CVec, FlowParams, RadialGrid};

fn scaled(v: Vec<CVec>, a: f64) -> Vec<CVec> {
    v.into_iter().map(|f| f * Complex64::new(a, 0.0)).collect()
}

fn run_to(sim: &Simulator, mut s: SimState, t_end: f64) -> SimState {
    let steps = (t_end / sim.dt()).round() as usize;
    for _ in 0..steps {
        s = sim.step(&s).unwrap();
    }
    s
}

fn max_diff(a: &SimState, b: &SimState) -> f64 {
    a.omega
        .iter()
        .chain(&a.rho)
        .zip(b.omega.iter().chain(&b.rho))
        .flat_map(|(x, y)| (&x.values - &y.values).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

#[test]
fn single_mode_self_interaction_support() {
    let grid = RadialGrid::build(2.0, 24).unwrap();
    let p = FlowParams::new(1e-2, 0.3, 1.0, 2.0, 4).unwrap();
    let (mut omega, rho) = init_profiles(InitFamily::Random { seed: 2 }, &grid, 4).unwrap();
    for (i, f) in omega.iter_mut().enumerate() {
        if i != 4 + 2 {
            f.fill(Complex64::new(0.0, 0.0));
        }
    }
    let ops: Vec<_> = (-4..=4).map(|k| assemble(&p, k, &grid).unwrap()).collect();
    let s = SimState::from_profiles(omega, rho, &ops, 0.01).unwrap();
    for k in -4..=4i64 {
        let out = vorticity_nonlinear(&s.omega, &s.phi, k, 0.5, p.a, &grid);
        let size = out.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if k != 4 && k != 0 {
            assert_eq!(size, 0.0, "mode {k}");
        }
    }
}

#[test]
fn zero_stream_gives_zero_temperature_transport() {
    let grid = RadialGrid::build(2.0, 24).unwrap();
    let p = FlowParams::new(1e-2, 0.3, 1.0, 2.0, 3).unwrap();
    let ops: Vec<_> = (-3..=3).map(|k| assemble(&p, k, &grid).unwrap()).collect();
    let (omega, rho) = init_profiles(InitFamily::Random { seed: 4 }, &grid, 3).unwrap();
    let zeros = vec![CVec::zeros(grid.n()); 7];
    let s = SimState::from_profiles(zeros, rho, &ops, 0.01).unwrap();
    for k in -3..=3 {
        assert!(temperature_nonlinear(&s.rho, &s.phi, k, 0.0, p.a, &grid)
            .values
            .iter()
            .all(|z| *z == Complex64::new(0.0, 0.0)));
    }
    let s = SimState::from_profiles(omega, vec![CVec::zeros(grid.n()); 7], &ops, 0.01).unwrap();
    for k in -3..=3 {
        assert!(temperature_nonlinear(&s.rho, &s.phi, k, 0.0, p.a, &grid)
            .values
            .iter()
            .all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(buoyancy_rhs(&s.rho, k, 0.0, &p, &grid).values.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }
}

#[test]
fn zero_mode_forcing_from_conjugate_pair() {
    let grid = RadialGrid::build(2.0, 32).unwrap();
    let p = FlowParams::new(1e-2, 0.0, 1.0, 2.0, 2).unwrap();
    let ops: Vec<_> = (-2..=2).map(|k| assemble(&p, k, &grid).unwrap()).collect();
    let n = grid.n();
    let r = grid.nodes().to_vec();
    let hat1 = grid.sample_complex(|r| Complex64::new((r - 1.0) * (2.0 - r), (r - 1.0).powi(2) * (2.0 - r)));
    // Stored weighted profiles at t = 0 with A = 0: r^{1/2} ρ̂.
    let w1 = CVec::from_iterator(n, hat1.iter().zip(&r).map(|(z, r)| z * r.sqrt()));
    let mut rho = vec![CVec::zeros(n); 5];
    rho[3] = w1.clone();
    rho[1] = w1.map(|z| z.conj());
    let s = SimState::from_profiles(vec![CVec::zeros(n); 5], rho, &ops, 0.01).unwrap();
    let (fw, fr) = zero_mode_rhs(&s, &p, &grid);
    let d = grid.differentiate(&hat1);
    for i in 0..n {
        let expect = (d[i] + hat1[i] / r[i]).re;
        assert!((fw[i].re - expect).abs() < 1e-12 && fw[i].im.abs() < 1e-14, "node {i}: {} vs {expect}", fw[i]);
        assert_eq!(fr[i], Complex64::new(0.0, 0.0));
    }
}

#[test]
fn zero_state_is_a_fixed_point() {
    let grid = RadialGrid::build(2.0, 24).unwrap();
    let p = FlowParams::new(1e-3, 1.0, 1.0, 2.0, 4).unwrap();
    let sim = Simulator::new(&p, &grid, 0.02, TermSwitches::default()).unwrap();
    let s = run_to(&sim, SimState::zeros(4, grid.n(), 0.02), 2.0);
    assert_eq!(s.max_abs(), 0.0);
}

#[test]
fn tiny_amplitude_follows_linear_evolution() {
    let grid = RadialGrid::build(2.0, 32).unwrap();
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 4).unwrap();
    let dt = 0.01;
    let sim = Simulator::new(&p, &grid, dt, TermSwitches::default()).unwrap();
    let (omega, _) = init_profiles(InitFamily::Random { seed: 8 }, &grid, 4).unwrap();
    let omega = scaled(omega, 1e-8);
    let rho = vec![CVec::zeros(grid.n()); 9];
    let mut s = sim.initial_state(omega.clone(), rho).unwrap();
    let steppers: Vec<_> = sim.ops().iter().map(|op| CrankNicolson::new(op, dt).unwrap()).collect();
    let mut lin = omega;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        s = sim.step(&s).unwrap();
        for ((f, op), cn) in lin.iter_mut().zip(sim.ops()).zip(&steppers) {
            *f = op.from_iso(&cn.advance(&op.to_iso(f), None).unwrap());
        }
        for (a, b) in s.omega.iter().zip(&lin) {
            worst = worst.max((&a.values - b).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    assert!(worst < 1e-12, "deviation {worst:e}");
}

#[test]
fn deviation_from_linearization_is_quadratic() {
    let grid = RadialGrid::build(2.0, 32).unwrap();
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 4).unwrap();
    let dt = 0.01;
    let full = Simulator::new(&p, &grid, dt, TermSwitches::default()).unwrap();
    let linear = Simulator::new(
        &p,
        &grid,
        dt,
        TermSwitches {
            transport: false,
            buoyancy: true,
        },
    )
    .unwrap();
    let (omega, rho) = init_profiles(InitFamily::Random { seed: 5 }, &grid, 4).unwrap();
    let amps = [1e-6, 1e-5, 1e-4];
    let devs: Vec<f64> = amps
        .iter()
        .map(|&a| {
            let s0 = full.initial_state(scaled(omega.clone(), a), scaled(rho.clone(), a)).unwrap();
            max_diff(&run_to(&full, s0.clone(), 1.0), &run_to(&linear, s0, 1.0))
        })
        .collect();
    let slope = (devs[2] / devs[0]).ln() / (amps[2] / amps[0]).ln();
    assert!((slope - 2.0).abs() <= 0.1, "slope {slope}, deviations {devs:?}");
}

#[test]
fn real_data_stays_real() {
    let grid = RadialGrid::build(2.0, 32).unwrap();
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 6).unwrap();
    let sim = Simulator::new(&p, &grid, 0.01, TermSwitches::default()).unwrap();
    let (omega, rho) = init_profiles(InitFamily::Random { seed: 11 }, &grid, 6).unwrap();
    let s = sim.initial_state(scaled(omega, 0.1), scaled(rho, 0.1)).unwrap();
    let t_end = 2.0;
    let s = run_to(&sim, s, t_end);
    assert!(s.conjugate_drift() / t_end < 1e-11, "drift {:e}", s.conjugate_drift());
}

#[test]
fn isolated_zero_mode_temperature_decays_monotonically() {
    let grid = RadialGrid::build(2.0, 32).unwrap();
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 3).unwrap();
    let sim = Simulator::new(&p, &grid, 0.05, TermSwitches::default()).unwrap();
    let n = grid.n();
    let mut rho = vec![CVec::zeros(n); 7];
    rho[3] = grid.sample(|r| (r - 1.0) * (2.0 - r) * (1.0 + r));
    let (omega, _) = init_profiles(InitFamily::Random { seed: 1 }, &grid, 3).unwrap();
    let mut s = sim.initial_state(omega, rho).unwrap();
    s.zero_nonzero_modes();
    let norm = |s: &SimState| grid.l2_rpow(&s.rho[3].values, 0.5);
    let mut last = norm(&s);
    for _ in 0..200 {
        s = sim.step(&s).unwrap();
        s.zero_nonzero_modes();
        let now = norm(&s);
        assert!(now <= last, "{now} > {last} at t = {}", s.t);
        last = now;
    }
    assert!(last > 0.0);
}

#[test]
fn halving_the_step_converges_at_second_order() {
    let grid = RadialGrid::build(2.0, 32).unwrap();
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 4).unwrap();
    let (omega, rho) = init_profiles(InitFamily::Random { seed: 3 }, &grid, 4).unwrap();
    let finals: Vec<SimState> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dt| {
            let sim = Simulator::new(&p, &grid, dt, TermSwitches::default()).unwrap();
            let s0 = sim.initial_state(scaled(omega.clone(), 0.5), scaled(rho.clone(), 0.5)).unwrap();
            run_to(&sim, s0, 1.0)
        })
        .collect();
    let order = (max_diff(&finals[0], &finals[1]) / max_diff(&finals[1], &finals[2])).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn checkpoint_round_trip_resumes_identically() {
    let grid = RadialGrid::build(2.0, 24).unwrap();
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 3).unwrap();
    let sim = Simulator::new(&p, &grid, 0.02, TermSwitches::default()).unwrap();
    let (omega, rho) = init_profiles(InitFamily::Random { seed: 6 }, &grid, 3).unwrap();
    let s = run_to(&sim, sim.initial_state(omega, rho).unwrap(), 0.2);
    let text = serde_json::to_string(&Checkpoint::of(&s)).unwrap();
    let back: Checkpoint = serde_json::from_str(&text).unwrap();
    let restored = back.restore(sim.ops()).unwrap();
    assert_eq!(restored, s);
    assert_eq!(sim.step(&restored).unwrap(), sim.step(&s).unwrap());
}

/// Amplitude far above the sufficient threshold is expected to destabilize
/// the flow within the horizon.
#[test]
fn thousandfold_threshold_amplitude_grows() {
    let p = FlowParams::new(1e-2, 1.0, 1.0, 2.0, 8).unwrap();
    let thr = threshold_rhs(&p, 0.01, 0.01)[0];
    let out = run_stability_experiment(&ExperimentConfig::new(p, 48, 1e3 * thr)).unwrap();
    println!("ratio {} outcome {:?}", out.verdict.sup_energy_ratio, out.verdict.outcome);
    assert!(
        out.verdict.outcome == Outcome::Growth || out.verdict.blowup,
        "verdict {:?}, energy ratio {}",
        out.verdict.outcome,
        out.verdict.sup_energy_ratio
    );
}
