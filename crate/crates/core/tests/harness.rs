use hydrolimit::config::{validate_config, InteractionKind, RunConfig, WeightKind};
use hydrolimit::harness::manifest::build_manifest;
use hydrolimit::harness::{emit_manifest, epsilon_sweep, run_pair, Fit, InteractionCase, SweepPlan, SweepResult, Thresholds};
use hydrolimit::model::Regime;
use hydrolimit::Error;

fn tiny(regime: Regime) -> RunConfig {
    RunConfig {
        regime,
        n_particles: 20_000,
        n_cells: 64,
        ..RunConfig::default()
    }
}

#[test]
fn large_epsilon_smoke() {
    let cfg = validate_config(RunConfig {
        epsilon: 0.4,
        dt: 0.005,
        t_final: 0.25,
        snapshot_stride: 10,
        ..tiny(Regime::Diffusive)
    })
    .unwrap();
    let pair = run_pair(&cfg).unwrap();
    assert_eq!(pair.records.len(), 6);
    assert!(pair.records.iter().all(|r| r.rel_entropy_e.is_finite() && r.rel_entropy_e < 1.0));
    // integrals of the gap dissipation rates accumulate from zero
    assert_eq!(pair.records[0].gamma_gap_integral, 0.0);
    assert!(pair.records.windows(2).all(|w| w[1].gamma_gap_integral >= w[0].gamma_gap_integral));
}

#[test]
fn uncoupled_rest_state_has_only_noise() {
    for regime in [Regime::Diffusive, Regime::Diffusionless] {
        let n = 20_000;
        let cfg = validate_config(RunConfig {
            epsilon: 0.2,
            gamma: 0.0,
            lambda: 0.0,
            alpha: 0.0,
            interaction: InteractionKind::None,
            weight: WeightKind::Zero,
            u0_amplitude: 0.0,
            dt: 0.005,
            t_final: 0.2,
            snapshot_stride: 20,
            ..tiny(regime)
        })
        .unwrap();
        let floor = 3.0 / (n as f64).sqrt();
        for r in run_pair(&cfg).unwrap().records {
            assert!(r.rel_entropy_e <= floor, "{regime:?} E={} at t={}", r.rel_entropy_e, r.time);
            assert!(r.mod_kinetic_e_hat <= floor, "{regime:?} E_hat={} at t={}", r.mod_kinetic_e_hat, r.time);
        }
    }
}

#[test]
fn metrics_csv_ignores_thread_count() {
    let cfg = validate_config(RunConfig {
        epsilon: 0.2,
        dt: 0.01,
        t_final: 0.1,
        snapshot_stride: 5,
        ..tiny(Regime::Diffusionless)
    })
    .unwrap();
    let csv: Vec<String> = [1, 8]
        .iter()
        .map(|&k| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
            pool.install(|| run_pair(&cfg)).unwrap().metrics_csv()
        })
        .collect();
    assert_eq!(csv[0], csv[1]);
}

fn plan() -> SweepPlan {
    SweepPlan {
        base: RunConfig {
            n_particles: 5_000,
            n_cells: 32,
            t_final: 0.1,
            ..RunConfig::default()
        },
        epsilons: vec![0.2, 0.1],
        seeds: vec![1, 2],
        case: InteractionCase::Coulomb,
        dt_ratio: 0.05,
        snapshot_interval: 0.05,
        thresholds: Thresholds::default(),
    }
}

#[test]
fn manifests_are_reproducible() {
    let p = plan();
    let a = epsilon_sweep(&p).unwrap();
    let b = epsilon_sweep(&p).unwrap();
    let (ma, mb) = (build_manifest(&a).unwrap(), build_manifest(&b).unwrap());
    assert_eq!(ma.summary_sha256, mb.summary_sha256);
    assert_eq!(ma, mb);

    let dir = tempfile::tempdir().unwrap();
    emit_manifest(&a, dir.path()).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    // manifest, summary and one metrics file per (epsilon, seed)
    assert_eq!(files.len(), 2 + 4);

    // every seed's error is the sup over time of E plus the Coulomb gap
    for point in &a.points {
        for run in &point.runs {
            let sup = run
                .records
                .iter()
                .map(|r| r.rel_entropy_e + r.coulomb_gap)
                .fold(0.0, f64::max);
            assert_eq!(sup, run.error);
        }
    }
}

#[test]
fn empty_sweep_has_no_manifest() {
    let empty = SweepResult {
        plan: plan(),
        points: Vec::new(),
        fit: Fit {
            slope: 0.0,
            intercept: 0.0,
            max_residual: 0.0,
        },
    };
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(emit_manifest(&empty, dir.path()), Err(Error::EmptySweep)));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
