use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// One violated configuration rule, addressed by the key that broke it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigViolation {
    pub field: String,
    pub message: String,
}

impl ConfigViolation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", join_violations(.0))]
    Config(Vec<ConfigViolation>),

    #[error("density does not have unit mean (mean = {mean})")]
    NonUnitMass { mean: f64 },

    #[error("interaction kernel is not odd-symmetric (max deviation {deviation:e})")]
    KernelAsymmetry { deviation: f64 },

    #[error("weight kernel is invalid: {0}")]
    InvalidWeight(String),

    #[error("array length mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("initial density must be bounded away from zero (min = {min})")]
    DegenerateDensity { min: f64 },

    #[error("time step {dt} exceeds the stiffness limit 0.5*epsilon = {limit}")]
    Stiffness { dt: f64, limit: f64 },

    #[error("particle velocity blew up at t = {time} (|v| = {speed:e})")]
    BlowUp { time: f64, speed: f64 },

    #[error("non-finite state at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("vacuum reached in pressureless flow at t = {time} (min density {min_density})")]
    Vacuum { time: f64, min_density: f64 },

    #[error("time step {dt} violates the CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("gradient blow-up detected at t = {time} (max gradient {gradient:e})")]
    GradientBlowUp { time: f64, gradient: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grids do not match ({0} vs {1} cells)")]
    GridMismatch(usize, usize),

    #[error("measures have different total mass ({0} vs {1})")]
    MassMismatch(f64, f64),

    #[error("{fraction:.4} of particles fall outside the velocity grid")]
    VGridTooNarrow { fraction: f64 },

    #[error("kinetic and fluid snapshot times disagree ({kinetic} vs {fluid})")]
    TimeGridMismatch { kinetic: f64, fluid: f64 },

    #[error("least-squares fit needs at least two distinct abscissae")]
    DegenerateFit,

    #[error("sweep produced no results")]
    EmptySweep,

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[ConfigViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the user's input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse(_)
                | Error::KernelAsymmetry { .. }
                | Error::InvalidWeight(_)
                | Error::Stiffness { .. }
                | Error::CflViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
