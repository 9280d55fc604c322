//! Epsilon sweeps and log-log rate fits.

use serde::{Deserialize, Serialize};

use crate::config::{validate_config, InteractionKind, RunConfig, ValidatedConfig};
use crate::error::{ConfigViolation, Error, Result};
use crate::harness::pair::run_pair;
use crate::kinetic::STIFFNESS_RATIO;
use crate::metrics::record::MetricRecord;
use crate::model::Regime;

/// Smallest epsilon a sweep may request.
pub const MIN_EPSILON: f64 = 0.05;

/// Interaction class of a sweep; selects the kernel and whether the
/// Coulomb field gap enters the error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionCase {
    Coulomb,
    WeaklyRegular,
    StronglyRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub min_slope: f64,
    /// Relative band for the monotonicity of `e(epsilon)`.
    pub monotone_band: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            min_slope: 0.4,
            monotone_band: 0.1,
        }
    }
}

fn default_dt_ratio() -> f64 {
    0.02
}

fn default_interval() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub base: RunConfig,
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub case: InteractionCase,
    /// Target `dt / epsilon`; the actual step divides the snapshot interval.
    #[serde(default = "default_dt_ratio")]
    pub dt_ratio: f64,
    #[serde(default = "default_interval")]
    pub snapshot_interval: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![ConfigViolation::new("<plan>", e.to_string())]))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn regime(&self) -> Regime {
        self.base.regime
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.epsilons.is_empty() {
            v.push(ConfigViolation::new("epsilons", "must not be empty"));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            v.push(ConfigViolation::new("epsilons", "must be strictly decreasing"));
        }
        if self.epsilons.iter().any(|e| !(*e >= MIN_EPSILON) || !e.is_finite()) {
            v.push(ConfigViolation::new("epsilons", format!("every epsilon must be at least {MIN_EPSILON}")));
        }
        if self.seeds.is_empty() {
            v.push(ConfigViolation::new("seeds", "must not be empty"));
        }
        if !(self.dt_ratio > 0.0 && self.dt_ratio <= STIFFNESS_RATIO) {
            v.push(ConfigViolation::new("dt_ratio", format!("must lie in (0, {STIFFNESS_RATIO}]")));
        }
        if !(self.snapshot_interval > 0.0) {
            v.push(ConfigViolation::new("snapshot_interval", "must be positive"));
        } else {
            let k = self.base.t_final / self.snapshot_interval;
            if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
                v.push(ConfigViolation::new("snapshot_interval", "must divide t_final"));
            }
        }
        if self.case != InteractionCase::Coulomb && self.base.interaction == InteractionKind::Coulomb {
            v.push(ConfigViolation::new("case", "regular cases need a kernel interaction in the base config"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// `(dt, stride)` for one epsilon.
    pub fn step_for(&self, epsilon: f64) -> (f64, usize) {
        let stride = (self.snapshot_interval / (self.dt_ratio * epsilon)).ceil().max(1.0) as usize;
        (self.snapshot_interval / stride as f64, stride)
    }

    /// Fully resolved configuration of one `(epsilon, seed)` run.
    pub fn config_for(&self, epsilon: f64, seed: u64) -> Result<ValidatedConfig> {
        let (dt, stride) = self.step_for(epsilon);
        let mut c = self.base.clone();
        c.epsilon = epsilon;
        c.beta = None;
        c.sigma = None;
        c.dt = dt;
        c.snapshot_stride = stride;
        c.seed = seed;
        if self.case == InteractionCase::Coulomb {
            c.interaction = InteractionKind::Coulomb;
        }
        validate_config(c)
    }

    /// The scalar error of one snapshot: the state terms on the left of the
    /// convergence estimate for this regime and interaction case.
    pub fn error_functional(&self, r: &MetricRecord) -> f64 {
        let base = match self.regime() {
            Regime::Diffusive => r.rel_entropy_e,
            Regime::Diffusionless => r.mod_kinetic_e_hat + r.d_bl * r.d_bl,
        };
        match self.case {
            InteractionCase::Coulomb => base + r.coulomb_gap,
            _ => base,
        }
    }
}

/// One seed of one epsilon.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub config_hash: String,
    pub records: Vec<MetricRecord>,
    /// Supremum over snapshots of the error functional.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub dt: f64,
    pub stride: usize,
    pub runs: Vec<SeedRun>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

impl SweepPoint {
    pub fn error_mean(&self) -> f64 {
        mean(self.runs.iter().map(|r| r.error))
    }

    pub fn error_min(&self) -> f64 {
        self.runs.iter().map(|r| r.error).fold(f64::INFINITY, f64::min)
    }

    pub fn error_max(&self) -> f64 {
        self.runs.iter().map(|r| r.error).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean over seeds of the supremum in time of the Coulomb field gap.
    pub fn coulomb_gap_sup(&self) -> f64 {
        mean(self.runs.iter().map(|r| r.records.iter().map(|x| x.coulomb_gap).fold(0.0, f64::max)))
    }

    /// Mean over seeds of the Maxwellian gap at the final time.
    pub fn l1_maxwellian_final(&self) -> Option<f64> {
        let finals: Option<Vec<f64>> = self
            .runs
            .iter()
            .map(|r| r.records.last().and_then(|x| x.l1_maxwellian))
            .collect();
        finals.map(|v| mean(v.into_iter()))
    }

    pub fn moment_violations(&self) -> usize {
        self.runs.iter().flat_map(|r| &r.records).map(|x| x.moment_violations).sum()
    }
}

/// Least-squares line through `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<Fit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    Ok(Fit {
        slope,
        intercept,
        max_residual,
    })
}

/// Fit of `log e` against `log epsilon`.
pub fn fit_rate(epsilons: &[f64], errors: &[f64]) -> Result<Fit> {
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::DegenerateFit);
    }
    let pts: Vec<(f64, f64)> = epsilons.iter().zip(errors).map(|(e, y)| (e.ln(), y.ln())).collect();
    fit_slope(&pts)
}

/// `true` when each value is at most `(1 + band)` times its predecessor.
pub fn monotone_within(values: &[f64], band: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + band))
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub plan: SweepPlan,
    pub points: Vec<SweepPoint>,
    pub fit: Fit,
}

impl SweepResult {
    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error_mean()).collect()
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.epsilon).collect()
    }

    pub fn monotone(&self) -> bool {
        monotone_within(&self.errors(), self.plan.thresholds.monotone_band)
    }

    /// Monotonicity of the Coulomb field gap alone; `true` outside the
    /// Coulomb case.
    pub fn coulomb_monotone(&self) -> bool {
        if self.plan.case != InteractionCase::Coulomb {
            return true;
        }
        let gaps: Vec<f64> = self.points.iter().map(|p| p.coulomb_gap_sup()).collect();
        monotone_within(&gaps, self.plan.thresholds.monotone_band)
    }

    pub fn passes(&self) -> bool {
        self.fit.slope >= self.plan.thresholds.min_slope && self.monotone() && self.coulomb_monotone()
    }

    /// Summary table, one row per epsilon.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from(
            "epsilon,dt,stride,e_mean,e_min,e_max,coulomb_gap_sup,l1_maxwellian_final,moment_violations,seeds\n",
        );
        for p in &self.points {
            let seeds: Vec<String> = p.runs.iter().map(|r| r.seed.to_string()).collect();
            s.push_str(&format!(
                "{:e},{:e},{},{:e},{:e},{:e},{:e},{},{},{}\n",
                p.epsilon,
                p.dt,
                p.stride,
                p.error_mean(),
                p.error_min(),
                p.error_max(),
                p.coulomb_gap_sup(),
                p.l1_maxwellian_final().map(|x| format!("{x:e}")).unwrap_or_default(),
                p.moment_violations(),
                seeds.join(" ")
            ));
        }
        s.push_str(&format!(
            "# slope={:e} intercept={:e} max_residual={:e}\n",
            self.fit.slope, self.fit.intercept, self.fit.max_residual
        ));
        s
    }
}

/// Runs every `(epsilon, seed)` pair of the plan and fits the rate.
pub fn epsilon_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let mut points = Vec::with_capacity(plan.epsilons.len());
    for &eps in &plan.epsilons {
        let (dt, stride) = plan.step_for(eps);
        let mut runs = Vec::with_capacity(plan.seeds.len());
        for &seed in &plan.seeds {
            let cfg = plan.config_for(eps, seed)?;
            let pair = run_pair(&cfg)?;
            let error = pair
                .records
                .iter()
                .map(|r| plan.error_functional(r))
                .fold(0.0, f64::max);
            runs.push(SeedRun {
                seed,
                config_hash: cfg.config.numerics_hash(),
                records: pair.records,
                error,
            });
        }
        points.push(SweepPoint {
            epsilon: eps,
            dt,
            stride,
            runs,
        });
    }
    let eps: Vec<f64> = points.iter().map(|p| p.epsilon).collect();
    let errs: Vec<f64> = points.iter().map(|p| p.error_mean()).collect();
    let fit = fit_rate(&eps, &errs)?;
    Ok(SweepResult {
        plan: plan.clone(),
        points,
        fit,
    })
}
