//! A reduced epsilon sweep with its manifest and a bitwise replay.
//!
//! Usage: `epsilon_sweep [out_dir] [diffusive|diffusionless] [n_particles]`.

use std::path::PathBuf;

use hydrolimit::config::RunConfig;
use hydrolimit::harness::{emit_manifest, epsilon_sweep, replay, InteractionCase, Manifest, SweepPlan, Thresholds};
use hydrolimit::model::Regime;

fn main() -> hydrolimit::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "sweep_example".into()));
    let regime = match args.next().as_deref() {
        Some("diffusionless") => Regime::Diffusionless,
        _ => Regime::Diffusive,
    };
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50_000);
    let plan = SweepPlan {
        base: RunConfig {
            regime,
            n_particles: n,
            ..RunConfig::default()
        },
        epsilons: vec![0.4, 0.2, 0.1],
        seeds: vec![1, 2],
        case: match regime {
            Regime::Diffusive => InteractionCase::WeaklyRegular,
            Regime::Diffusionless => InteractionCase::StronglyRegular,
        },
        dt_ratio: 0.02,
        snapshot_interval: 0.05,
        thresholds: Thresholds::default(),
    };
    let result = epsilon_sweep(&plan)?;
    print!("{}", result.summary_csv());
    println!("passes thresholds: {}", result.passes());

    let path = emit_manifest(&result, &out)?;
    let report = replay(&Manifest::load(&path)?)?;
    println!("replay of {} identical: {}", path.display(), report.identical());
    Ok(())
}
