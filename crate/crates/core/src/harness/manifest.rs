//! Sweep manifests: everything needed to rerun a sweep and compare its
//! outputs bit for bit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::pair::metrics_csv;
use crate::harness::sweep::{epsilon_sweep, Fit, SweepPlan, SweepResult};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub seed: u64,
    pub config_hash: String,
    pub error: f64,
    /// `error` as raw IEEE bits, for exact comparison.
    pub error_bits: String,
    pub metrics_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEntry {
    pub epsilon: f64,
    pub dt: f64,
    pub stride: usize,
    pub error_mean: f64,
    pub seeds: Vec<SeedEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub plan: SweepPlan,
    pub points: Vec<PointEntry>,
    pub fit: Fit,
    pub summary_sha256: String,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn metrics_name(epsilon: f64, seed: u64) -> String {
    format!("metrics_eps{epsilon}_seed{seed}.csv")
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Builds the manifest of a sweep result without touching the filesystem.
pub fn build_manifest(result: &SweepResult) -> Result<Manifest> {
    if result.points.is_empty() || result.points.iter().any(|p| p.runs.is_empty()) {
        return Err(Error::EmptySweep);
    }
    let points = result
        .points
        .iter()
        .map(|p| PointEntry {
            epsilon: p.epsilon,
            dt: p.dt,
            stride: p.stride,
            error_mean: p.error_mean(),
            seeds: p
                .runs
                .iter()
                .map(|r| SeedEntry {
                    seed: r.seed,
                    config_hash: r.config_hash.clone(),
                    error: r.error,
                    error_bits: format!("{:016x}", r.error.to_bits()),
                    metrics_file: metrics_name(p.epsilon, r.seed),
                })
                .collect(),
        })
        .collect();
    Ok(Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        plan: result.plan.clone(),
        points,
        fit: result.fit,
        summary_sha256: sha_hex(result.summary_csv().as_bytes()),
    })
}

/// Writes `manifest.json`, `summary.csv` and one metrics CSV per
/// `(epsilon, seed)` into `dir`; returns the manifest path.
pub fn emit_manifest(result: &SweepResult, dir: &Path) -> Result<PathBuf> {
    let manifest = build_manifest(result)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for p in &result.points {
        for r in &p.runs {
            write(&dir.join(metrics_name(p.epsilon, r.seed)), metrics_csv(&r.records).as_bytes())?;
        }
    }
    write(&dir.join(SUMMARY_FILE), result.summary_csv().as_bytes())?;
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    write(&path, json.as_bytes())?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub result: SweepResult,
    /// `(epsilon, seed)` of every run whose error differs in any bit.
    pub mismatches: Vec<(f64, u64)>,
    pub summary_matches: bool,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.mismatches.is_empty() && self.summary_matches
    }
}

/// Reruns the sweep recorded in a manifest and compares the outputs.
pub fn replay(manifest: &Manifest) -> Result<ReplayReport> {
    let result = epsilon_sweep(&manifest.plan)?;
    let fresh = build_manifest(&result)?;
    let mut mismatches = Vec::new();
    for (old, new) in manifest.points.iter().zip(&fresh.points) {
        for (a, b) in old.seeds.iter().zip(&new.seeds) {
            if a.error_bits != b.error_bits || a.config_hash != b.config_hash {
                mismatches.push((old.epsilon, a.seed));
            }
        }
    }
    if manifest.points.len() != fresh.points.len() {
        mismatches.push((f64::NAN, 0));
    }
    Ok(ReplayReport {
        summary_matches: fresh.summary_sha256 == manifest.summary_sha256,
        result,
        mismatches,
    })
}
