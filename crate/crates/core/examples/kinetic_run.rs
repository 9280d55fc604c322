//! Particle solver on its own: moments, energy and dissipation integrals at
//! each snapshot of a diffusive run.

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::kinetic::run_kinetic_with;

fn main() -> hydrolimit::Result<()> {
    let cfg = validate_config(RunConfig {
        epsilon: 0.1,
        n_particles: 100_000,
        dt: 0.002,
        t_final: 0.5,
        snapshot_stride: 50,
        ..RunConfig::default()
    })?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "t", "mass", "momentum", "energy", "int_local", "max|rho-1|");
    run_kinetic_with(&cfg, |snap| {
        let g = &cfg.grid;
        let e = snap.mechanical_energy(&cfg.fields, &cfg.params);
        let dev = snap.moments.rho.iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()));
        println!(
            "{:>6.3} {:>10.6} {:>10.2e} {:>10.5} {:>10.5} {:>10.4}",
            snap.time,
            g.integrate(&snap.moments.rho),
            g.integrate(&snap.moments.rho_u),
            e,
            snap.integrals.local,
            dev
        );
        Ok(())
    })
}
