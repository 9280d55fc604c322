//! Phase-space diagnostics of a diffusive run: histogram entropy, free
//! energy with its dissipations, and the distance to the local Maxwellian.

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::harness::{fluid_companion, free_energy_bound};
use hydrolimit::kinetic::run_kinetic;
use hydrolimit::metrics::record::MetricRecord;
use hydrolimit::metrics::{free_energy_and_dissipations, l1_maxwellian_gap};

fn main() -> hydrolimit::Result<()> {
    let cfg = validate_config(RunConfig {
        epsilon: 0.1,
        n_particles: 200_000,
        dt: 0.002,
        snapshot_stride: 25,
        ..RunConfig::default()
    })?;
    let kin = run_kinetic(&cfg)?;
    let flu = fluid_companion(&cfg)?;
    let c = &cfg.config;
    println!("{:>6} {:>9} {:>9} {:>9} {:>9} {:>9}", "t", "F", "entropy", "D2", "D3", "L1 gap");
    let mut records = Vec::new();
    for (k, f) in kin.snapshots.iter().zip(&flu) {
        let fe = free_energy_and_dissipations(&k.ensemble, &k.moments, &k.fields, &cfg.fields, &cfg.params, cfg.vgrid, c.n_x_bins)?;
        let gap = l1_maxwellian_gap(&k.ensemble, &cfg.grid, &f.state.density(), f.state.velocity(), cfg.vgrid, c.n_x_bins)?;
        println!(
            "{:>6.3} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            k.time, fe.free_energy, fe.entropy, fe.d2, fe.d3, gap
        );
        records.push(MetricRecord::compute(&cfg, k, f)?);
    }
    let bound = free_energy_bound(&cfg, &records);
    println!(
        "envelope F(0) exp({:.3} t): {} of {} snapshots above it (F(0) = {:.4})",
        bound.kappa,
        bound.violations.len(),
        records.len(),
        bound.initial
    );
    Ok(())
}
