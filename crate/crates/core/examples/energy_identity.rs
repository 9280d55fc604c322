//! Discrete residual of the kinetic energy balance without diffusion, under
//! step halving. The balance holds pathwise, so the residual is a pure
//! time-discretization error and should halve with `dt`.

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::harness::energy_identity_residual;
use hydrolimit::model::Regime;

fn main() -> hydrolimit::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let mut prev: Option<f64> = None;
    for dt in [0.01, 0.005, 0.0025] {
        let cfg = validate_config(RunConfig {
            regime: Regime::Diffusionless,
            epsilon: 0.2,
            n_particles: n,
            dt,
            t_final: 0.5,
            snapshot_stride: 1_000_000,
            ..RunConfig::default()
        })?;
        let r = energy_identity_residual(&cfg)?;
        match prev {
            Some(p) => println!("dt={dt:<7} residual={r:+.5e} ratio={:.3}", p / r),
            None => println!("dt={dt:<7} residual={r:+.5e}"),
        }
        prev = Some(r);
    }
    Ok(())
}
