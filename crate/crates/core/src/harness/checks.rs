//! Post-hoc checks on the recorded functionals of a run.

use crate::config::ValidatedConfig;
use crate::error::Result;
use crate::kinetic::{run_kinetic_with, KineticSnapshot};
use crate::metrics::record::MetricRecord;

/// Exponential envelope `F(t) <= F(0) exp(kappa t)` for the free energy,
/// with `kappa = C (1 + gamma^2) / beta` and `C = 10 (1 + |phi|_inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyBound {
    pub kappa: f64,
    pub initial: f64,
    /// `(time, measured, envelope)` of every snapshot above the envelope.
    pub violations: Vec<(f64, f64, f64)>,
    /// Snapshots without a free-energy estimate.
    pub missing: usize,
}

impl FreeEnergyBound {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.missing == 0
    }
}

pub fn bound_rate(cfg: &ValidatedConfig) -> f64 {
    let p = &cfg.params;
    let c = 10.0 * (1.0 + cfg.fields.weight().sup_norm());
    c * (1.0 + p.gamma * p.gamma) / p.beta
}

/// Compares every snapshot's free energy against the envelope anchored at
/// the first record.
pub fn free_energy_bound(cfg: &ValidatedConfig, records: &[MetricRecord]) -> FreeEnergyBound {
    let kappa = bound_rate(cfg);
    let initial = records.first().and_then(|r| r.free_energy).unwrap_or(f64::NAN);
    let mut violations = Vec::new();
    let mut missing = 0;
    for r in records {
        match r.free_energy {
            Some(f) => {
                let env = initial * (kappa * (r.time - records[0].time)).exp();
                if !(f <= env) {
                    violations.push((r.time, f, env));
                }
            }
            None => missing += 1,
        }
    }
    FreeEnergyBound {
        kappa,
        initial,
        violations,
        missing,
    }
}

/// Residual of the mechanical energy balance between the first and last
/// record: `E(T) - E(0) + beta int local + alpha int D2 + gamma int D3`.
pub fn kinetic_energy_residual(cfg: &ValidatedConfig, records: &[MetricRecord]) -> f64 {
    let (Some(a), Some(b)) = (records.first(), records.last()) else {
        return f64::NAN;
    };
    let p = &cfg.params;
    b.mechanical_energy() - a.mechanical_energy()
        + p.beta * (b.int_local - a.int_local)
        + p.alpha * (b.int_d2 - a.int_d2)
        + p.gamma * (b.int_d3 - a.int_d3)
}

/// Same balance directly from two kinetic snapshots.
pub fn kinetic_identity_residual(cfg: &ValidatedConfig, first: &KineticSnapshot, last: &KineticSnapshot) -> f64 {
    let p = &cfg.params;
    let (a, b) = (first.integrals, last.integrals);
    last.mechanical_energy(&cfg.fields, p) - first.mechanical_energy(&cfg.fields, p)
        + p.beta * (b.local - a.local)
        + p.alpha * (b.d2 - a.d2)
        + p.gamma * (b.d3 - a.d3)
}

/// Runs the particle system alone and returns the energy-balance residual
/// over `[0, t_final]`. Only the first and last states are kept.
pub fn energy_identity_residual(cfg: &ValidatedConfig) -> Result<f64> {
    let mut first: Option<KineticSnapshot> = None;
    let mut residual = f64::NAN;
    let n_steps = cfg.config.n_steps();
    run_kinetic_with(cfg, |snap| {
        match &first {
            None => first = Some(snap.clone()),
            Some(f) if snap.step == n_steps => residual = kinetic_identity_residual(cfg, f, snap),
            Some(_) => {}
        }
        Ok(())
    })?;
    Ok(residual)
}
