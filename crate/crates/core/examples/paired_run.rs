//! Paired kinetic and fluid runs in both regimes, with the distance
//! functionals and the moment inequality ledger at each snapshot.

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::harness::run_pair;
use hydrolimit::metrics::moments::ROW_NAMES;
use hydrolimit::model::Regime;

fn main() -> hydrolimit::Result<()> {
    for regime in [Regime::Diffusive, Regime::Diffusionless] {
        let cfg = validate_config(RunConfig {
            regime,
            epsilon: 0.1,
            n_particles: 100_000,
            dt: 0.002,
            snapshot_stride: 25,
            ..RunConfig::default()
        })?;
        let pair = run_pair(&cfg)?;
        println!("{} regime", regime.as_str());
        println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "t", "E", "E_hat", "d_BL", "W1", "fluid res");
        for r in &pair.records {
            println!(
                "{:>6.3} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.2e}",
                r.time, r.rel_entropy_e, r.mod_kinetic_e_hat, r.d_bl, r.w1, r.fluid_residual
            );
        }
        let last = pair.records.last().expect("at least one snapshot");
        for (name, (lhs, rhs)) in ROW_NAMES.iter().zip(&last.moment_rows) {
            println!("  {name:<7} {lhs:.3e} <= {rhs:.3e}");
        }
    }
    Ok(())
}
