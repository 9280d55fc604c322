//! Building, validating and hashing run configurations.

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::model::Regime;
use hydrolimit::Error;

fn main() {
    let good = RunConfig {
        epsilon: 0.1,
        beta: Some(10.0),
        sigma: Some(10.0),
        ..RunConfig::default()
    };
    let cfg = validate_config(good.clone()).expect("consistent coupling");
    println!("accepted: {:?}, {} steps, hash {}", cfg.params, cfg.config.n_steps(), good.numerics_hash());

    // every broken rule is reported at once
    let bad = RunConfig {
        regime: Regime::Diffusionless,
        sigma: Some(0.5),
        n_cells: 100,
        dt: -1.0,
        ..RunConfig::default()
    };
    match validate_config(bad) {
        Err(Error::Config(violations)) => {
            for v in violations {
                println!("rejected: {v}");
            }
        }
        other => println!("unexpected: {other:?}"),
    }

    // output locations do not change the numerics hash; anything else does
    let moved = RunConfig {
        output_dir: Some("elsewhere".into()),
        ..good.clone()
    };
    let reseeded = RunConfig { seed: 2, ..good.clone() };
    println!(
        "same hash after moving output: {}, after reseeding: {}",
        moved.numerics_hash() == good.numerics_hash(),
        reseeded.numerics_hash() == good.numerics_hash()
    );

    match RunConfig::from_json(r#"{"epsilon": 0.1, "n_cell": 64}"#) {
        Err(e) => println!("unknown key: {e}"),
        Ok(_) => println!("unknown key accepted?"),
    }
}
