//! Paired kinetic and fluid runs on a shared snapshot grid.

use std::io::Write;
use std::path::Path;

use crate::config::ValidatedConfig;
use crate::error::{Error, Result};
use crate::fluid::{initial_state, run_fluid, FluidSchedule, FluidSnapshot, FluidSpecs};
use crate::kinetic::{run_kinetic_with, KineticSnapshot};
use crate::metrics::record::MetricRecord;

/// Largest tolerated difference between kinetic and fluid snapshot times.
const TIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PairRun {
    pub fluid: Vec<FluidSnapshot>,
    pub records: Vec<MetricRecord>,
}

impl PairRun {
    pub fn metrics_csv(&self) -> String {
        metrics_csv(&self.records)
    }
}

pub fn metrics_csv(records: &[MetricRecord]) -> String {
    let mut s = MetricRecord::csv_header();
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Solves the fluid system on the kinetic snapshot grid.
pub fn fluid_companion(cfg: &ValidatedConfig) -> Result<Vec<FluidSnapshot>> {
    let state = initial_state(cfg)?;
    let specs = FluidSpecs::from_config(cfg);
    let schedule = FluidSchedule::for_config(cfg, &state);
    run_fluid(state, &specs, schedule)
}

/// Runs both solvers and evaluates every functional at each shared time;
/// `observe` also sees the kinetic snapshot (for particle dumps).
pub fn run_pair_with(
    cfg: &ValidatedConfig,
    mut observe: impl FnMut(&KineticSnapshot, &FluidSnapshot, &MetricRecord) -> Result<()>,
) -> Result<PairRun> {
    let fluid = fluid_companion(cfg)?;
    let mut records: Vec<MetricRecord> = Vec::with_capacity(fluid.len());
    let mut next = 0usize;
    run_kinetic_with(cfg, |kin| {
        let flu = fluid.get(next).ok_or(Error::TimeGridMismatch {
            kinetic: kin.time,
            fluid: f64::NAN,
        })?;
        if (flu.state.time - kin.time).abs() > TIME_TOL {
            return Err(Error::TimeGridMismatch {
                kinetic: kin.time,
                fluid: flu.state.time,
            });
        }
        let mut rec = MetricRecord::compute(cfg, kin, flu)?;
        if let Some(prev) = records.last() {
            let half = 0.5 * (rec.time - prev.time);
            rec.gamma_gap_integral = prev.gamma_gap_integral + half * (prev.gamma_gap_rate + rec.gamma_gap_rate);
            rec.phi_gap_integral = prev.phi_gap_integral + half * (prev.dbl_phi_dissip + rec.dbl_phi_dissip);
        }
        observe(kin, flu, &rec)?;
        records.push(rec);
        next += 1;
        Ok(())
    })?;
    if next != fluid.len() {
        return Err(Error::TimeGridMismatch {
            kinetic: records.last().map_or(0.0, |r| r.time),
            fluid: fluid.last().map_or(0.0, |f| f.state.time),
        });
    }
    Ok(PairRun { fluid, records })
}

pub fn run_pair(cfg: &ValidatedConfig) -> Result<PairRun> {
    run_pair_with(cfg, |_, _, _| Ok(()))
}

/// Writes `x,v` rows of one snapshot's particles.
pub fn dump_particles(path: &Path, kin: &KineticSnapshot) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "x,v").map_err(io)?;
    for (x, v) in kin.ensemble.positions.iter().zip(&kin.ensemble.velocities) {
        writeln!(w, "{x:e},{v:e}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Writes `x,rho,u` rows of a fluid snapshot.
pub fn dump_fluid(path: &Path, cfg: &ValidatedConfig, flu: &FluidSnapshot) -> Result<()> {
    let mut s = String::from("x,rho,u\n");
    let rho = flu.state.density();
    for (j, (r, u)) in rho.iter().zip(flu.state.velocity()).enumerate() {
        s.push_str(&format!("{:e},{r:e},{u:e}\n", cfg.grid.center(j)));
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
