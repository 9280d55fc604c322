//! Particle and spectral solvers for a kinetic Cucker–Smale model with
//! confinement, interaction, local alignment and diffusion on the unit
//! torus, together with its two hydrodynamic limits and the functionals used
//! to measure how fast the kinetic moments approach the fluid solution.

pub mod config;
pub mod error;
pub mod fields;
pub mod fluid;
pub mod harness;
pub mod kinetic;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod spectral;

pub use error::{ConfigViolation, Error, Result};
