//! Standalone fluid runs: mass drift over 10^4 steps and the order of the
//! energy-balance residual under step refinement, for both limit systems.

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::fluid::{initial_state, run_fluid, FluidSchedule, FluidSpecs};
use hydrolimit::model::Regime;

fn main() -> hydrolimit::Result<()> {
    for regime in [Regime::Diffusive, Regime::Diffusionless] {
        let cfg = validate_config(RunConfig {
            regime,
            ..RunConfig::default()
        })?;
        let specs = FluidSpecs::from_config(&cfg);
        let state = initial_state(&cfg)?;

        // T = 1 keeps the pressureless flow clear of vacuum
        let schedule = FluidSchedule {
            dt: 1e-4,
            n_steps: 10_000,
            stride: 10_000,
        };
        let snaps = run_fluid(state.clone(), &specs, schedule)?;
        let m0 = snaps[0].ledger.mass;
        let m1 = snaps.last().unwrap().ledger.mass;
        println!("{}: dt={:.3e} mass drift over 1e4 steps = {:.3e}", regime.as_str(), schedule.dt, (m1 - m0).abs());

        let mut prev: Option<f64> = None;
        for k in 0..4 {
            let stride = 200 << k;
            let sched = FluidSchedule {
                dt: 0.5 / stride as f64,
                n_steps: stride,
                stride,
            };
            let r = run_fluid(state.clone(), &specs, sched)?.last().unwrap().ledger.residual;
            match prev {
                Some(p) => println!("  dt={:.4e} residual={r:+.4e} order={:.3}", sched.dt, (p / r).abs().log2()),
                None => println!("  dt={:.4e} residual={r:+.4e}", sched.dt),
            }
            prev = Some(r);
        }
    }
    Ok(())
}
