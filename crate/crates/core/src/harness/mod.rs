//! Orchestration: paired runs, epsilon sweeps, checks on recorded
//! functionals, and reproducible manifests.

pub mod checks;
pub mod manifest;
pub mod pair;
pub mod sweep;

pub use checks::{energy_identity_residual, free_energy_bound, kinetic_energy_residual, kinetic_identity_residual, FreeEnergyBound};
pub use manifest::{emit_manifest, replay, Manifest, ReplayReport};
pub use pair::{dump_fluid, dump_particles, fluid_companion, metrics_csv, run_pair, run_pair_with, PairRun};
pub use sweep::{
    epsilon_sweep, fit_rate, fit_slope, monotone_within, Fit, InteractionCase, SweepPlan, SweepPoint, SweepResult,
    Thresholds,
};
