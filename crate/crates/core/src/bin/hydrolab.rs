//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
//! 4 acceptance threshold missed (`sweep --assert`). A replay whose
//! outputs differ from the manifest counts as a numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hydrolimit::config::{validate_config, RunConfig};
use hydrolimit::harness::{self, Manifest, SweepPlan};
use hydrolimit::metrics::rel_entropy_pointwise;
use hydrolimit::metrics::transport::{dbl_atoms, w1_atoms};
use hydrolimit::{oracle, Error, Result};

#[derive(Parser)]
#[command(name = "hydrolab", version, about = "Kinetic to fluid convergence lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a run configuration and report every violated rule.
    Validate { config: PathBuf },
    /// Paired kinetic and fluid run; writes metrics.csv to the output dir.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Epsilon sweep from a plan file.
    Sweep {
        plan: PathBuf,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
        /// Exit with 4 if the fitted slope or monotonicity misses the plan thresholds.
        #[arg(long)]
        assert: bool,
    },
    /// Rerun the sweep of a manifest and compare outputs bit for bit.
    Replay { manifest: PathBuf },
    /// Fast path against brute-force reference values.
    Oracle {
        metric: OracleMetric,
        /// Atom positions, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<f64>,
        /// Integer masses of the first measure.
        #[arg(long, value_delimiter = ',')]
        mu: Vec<u32>,
        /// Integer masses of the second measure.
        #[arg(long, value_delimiter = ',')]
        nu: Vec<u32>,
        /// Entropy arguments `a,b`.
        #[arg(long, value_delimiter = ',')]
        pair: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMetric {
    W1,
    Dbl,
    Entropy,
}

fn validate(path: &Path) -> Result<()> {
    let cfg = validate_config(RunConfig::load(path)?)?;
    println!(
        "ok regime={} epsilon={} beta={} sigma={} steps={} hash={}",
        cfg.regime().as_str(),
        cfg.params.epsilon,
        cfg.params.beta,
        cfg.params.sigma,
        cfg.config.n_steps(),
        cfg.config.numerics_hash()
    );
    Ok(())
}

fn run(path: &Path, out: Option<PathBuf>) -> Result<()> {
    let cfg = validate_config(RunConfig::load(path)?)?;
    let dir = out.or_else(|| cfg.config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("run_out"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let dump = cfg.config.dump_particles;
    let pair = harness::run_pair_with(&cfg, |kin, flu, _| {
        if dump {
            harness::dump_particles(&dir.join(format!("particles_{:06}.csv", kin.step)), kin)?;
            harness::dump_fluid(&dir.join(format!("fluid_{:06}.csv", kin.step)), &cfg, flu)?;
        }
        Ok(())
    })?;
    let metrics = dir.join("metrics.csv");
    std::fs::write(&metrics, pair.metrics_csv()).map_err(|e| Error::io(&metrics, e))?;
    if let Some(last) = pair.records.last() {
        println!(
            "t={} E={:e} d_BL={:e} moment_violations={} -> {}",
            last.time,
            last.rel_entropy_e,
            last.d_bl,
            pair.records.iter().map(|r| r.moment_violations).sum::<usize>(),
            metrics.display()
        );
    }
    Ok(())
}

/// `Ok(true)` when the thresholds hold.
fn sweep(path: &Path, out: &Path) -> Result<bool> {
    let plan = SweepPlan::load(path)?;
    let result = harness::epsilon_sweep(&plan)?;
    let manifest = harness::emit_manifest(&result, out)?;
    print!("{}", result.summary_csv());
    println!("manifest: {}", manifest.display());
    Ok(result.passes())
}

fn replay(path: &Path) -> Result<bool> {
    let manifest = Manifest::load(path)?;
    let report = harness::replay(&manifest)?;
    for (eps, seed) in &report.mismatches {
        println!("mismatch epsilon={eps} seed={seed}");
    }
    println!("summary identical: {}", report.summary_matches);
    Ok(report.identical())
}

fn oracle_cmd(metric: OracleMetric, points: &[f64], mu: &[u32], nu: &[u32], pair: &[f64]) -> Result<()> {
    match metric {
        OracleMetric::Entropy => {
            let [a, b] = pair else {
                return Err(Error::Parse("entropy needs --pair a,b".into()));
            };
            println!("fast={:e} oracle={:e}", rel_entropy_pointwise(*a, *b)?, oracle::entropy_quadrature(*a, *b));
        }
        OracleMetric::W1 | OracleMetric::Dbl => {
            if points.len() != mu.len() || points.len() != nu.len() {
                return Err(Error::Parse("--points, --mu and --nu need equal lengths".into()));
            }
            let total: u32 = mu.iter().sum();
            if total != nu.iter().sum::<u32>() || total == 0 || total > 20 {
                return Err(Error::Parse("masses must have equal positive totals of at most 20".into()));
            }
            let norm = |m: &[u32]| -> Vec<f64> { m.iter().map(|k| *k as f64 / total as f64).collect() };
            let fast = match metric {
                OracleMetric::W1 => w1_atoms(points, &norm(mu), &norm(nu))?,
                _ => dbl_atoms(points, &norm(mu), &norm(nu))?,
            };
            println!("fast={fast:e} oracle={:e}", oracle::w1_integer_masses(points, mu, nu));
        }
    }
    Ok(())
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_config() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { config } => validate(config).map(|_| true),
        Command::Run { config, out } => run(config, out.clone()).map(|_| true),
        Command::Sweep { plan, out, assert } => sweep(plan, out).map(|ok| ok || !assert),
        Command::Replay { manifest } => match replay(manifest) {
            Ok(false) => return ExitCode::from(3),
            other => other,
        },
        Command::Oracle {
            metric,
            points,
            mu,
            nu,
            pair,
        } => oracle_cmd(*metric, points, mu, nu, pair).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => exit_for(&e),
    }
}
