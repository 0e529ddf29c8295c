//! Truncated nonlinear simulation of the mode-coupled vorticity and
//! temperature system, with the stability energy functionals.

pub mod energy;
pub mod experiment;
pub mod state;
pub mod stepper;
pub mod terms;

pub use energy::{energy_ledger, initial_energy, threshold_rhs, EnergyAccumulator, EnergyLedger, ModeEnergy};
pub use experiment::{
    init_profiles, run_stability_experiment, smallness, ExperimentConfig, ExperimentOutcome, ExperimentVerdict, InitFamily, InitialConditions, Outcome,
};
pub use state::{Checkpoint, SimState};
pub use stepper::{step_nonlinear, Simulator, StepReport};
pub use terms::{
    buoyancy_rhs, combine_f1_f2, explicit_rhs, f1, f2, g1, g2, temperature_nonlinear, transport_hat, vorticity_nonlinear, zero_mode_rhs, TermSwitches,
};
