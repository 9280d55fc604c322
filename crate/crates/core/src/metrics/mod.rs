//! Functionals comparing a particle snapshot with a fluid state.

pub mod entropy;
pub mod moments;
pub mod phase;
pub mod record;
pub mod transport;

pub use entropy::{coulomb_gap, fluid_relative_entropy, rel_entropy_pointwise, FluidGap};
pub use moments::{moment_gap_checks, MomentLedger, MomentRow};
pub use phase::{free_energy_and_dissipations, l1_maxwellian_gap, FreeEnergy, PhaseHistogram};
pub use record::MetricRecord;
pub use transport::{dbl_distance, w1_distance};
