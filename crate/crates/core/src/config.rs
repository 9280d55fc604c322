//! Run configuration: a flat JSON object whose keys mirror [`RunConfig`]'s
//! fields. Missing keys take the documented defaults; unknown keys are
//! rejected.
//!
//! ```text
//! regime            "diffusive" | "diffusionless"
//! epsilon           singular parameter (> 0)
//! gamma lambda alpha
//! beta sigma        optional; when present must match the regime rule
//! n_cells           power of two
//! n_particles dt t_final seed snapshot_stride
//! v_min v_max n_v n_x_bins          phase-space histogram window
//! potential         "zero" | "cosine_well"      (+ potential_amplitude)
//! interaction       "none" | "coulomb" | "sine" | "table"
//!                   (+ interaction_amplitude, interaction_table = CSV path)
//! weight            "zero" | "constant" | "cosine" | "table"
//!                   (+ weight_mean, weight_amplitude, weight_table)
//! rho0_amplitude rho0_mode u0_amplitude u0_mode
//!                   rho0 = 1 + a cos(2 pi m x), u0 = b sin(2 pi m x)
//! eps_reg           moment regularizer (>= 0)
//! dealias           2/3-rule filter in the fluid solver
//! fluid_cfl         fraction of the CFL limit used by the fluid solver
//! output_dir dump_particles
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ConfigViolation, Error, Result};
use crate::fields::{FieldModel, InteractionSpec, KernelTable, PotentialSpec, WeightSpec};
use crate::model::{Grid1D, ModelParams, Regime, VelocityGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    CosineWell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    None,
    Coulomb,
    /// `grad W = a sin(2 pi x) / (2 pi)`.
    Sine,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Zero,
    Constant,
    Cosine,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub regime: Regime,
    pub epsilon: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub sigma: Option<f64>,
    pub n_cells: usize,
    pub n_particles: usize,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub snapshot_stride: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub n_v: usize,
    pub n_x_bins: usize,
    pub potential: PotentialKind,
    pub potential_amplitude: f64,
    pub interaction: InteractionKind,
    pub interaction_amplitude: f64,
    pub interaction_table: Option<PathBuf>,
    pub weight: WeightKind,
    pub weight_mean: f64,
    pub weight_amplitude: f64,
    pub weight_table: Option<PathBuf>,
    pub rho0_amplitude: f64,
    pub rho0_mode: u32,
    pub u0_amplitude: f64,
    pub u0_mode: u32,
    pub eps_reg: f64,
    pub dealias: bool,
    pub fluid_cfl: f64,
    pub output_dir: Option<PathBuf>,
    pub dump_particles: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            regime: Regime::Diffusive,
            epsilon: 0.1,
            gamma: 0.5,
            lambda: 1.0,
            alpha: 1.0,
            beta: None,
            sigma: None,
            n_cells: 128,
            n_particles: 200_000,
            dt: 0.0025,
            t_final: 0.5,
            seed: 1,
            snapshot_stride: 20,
            v_min: -6.0,
            v_max: 6.0,
            n_v: 64,
            n_x_bins: 64,
            potential: PotentialKind::Zero,
            potential_amplitude: 0.0,
            interaction: InteractionKind::Sine,
            interaction_amplitude: 1.0,
            interaction_table: None,
            weight: WeightKind::Cosine,
            weight_mean: 1.0,
            weight_amplitude: 0.5,
            weight_table: None,
            rho0_amplitude: 0.3,
            rho0_mode: 1,
            u0_amplitude: 0.2,
            u0_mode: 1,
            eps_reg: 1e-8,
            dealias: true,
            fluid_cfl: 0.5,
            output_dir: None,
            dump_particles: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(vec![ConfigViolation::new("<document>", e.to_string())])
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn params(&self) -> ModelParams {
        let mut p = ModelParams::for_regime(self.regime, self.epsilon, self.gamma, self.lambda, self.alpha);
        if let Some(b) = self.beta {
            p.beta = b;
        }
        if let Some(s) = self.sigma {
            p.sigma = s;
        }
        p
    }

    /// Total number of time steps.
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// SHA-256 over every field that influences the numbers a run produces.
    pub fn numerics_hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.dump_particles = false;
        let canonical = serde_json::to_string(&c).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        for table in [&self.interaction_table, &self.weight_table].into_iter().flatten() {
            if let Ok(bytes) = std::fs::read(table) {
                hasher.update(&bytes);
            }
        }
        hex::encode(hasher.finalize())
    }
}

/// A configuration that passed validation, with grids and kernels resolved.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub config: RunConfig,
    pub params: ModelParams,
    pub grid: Grid1D,
    pub vgrid: VelocityGrid,
    pub fields: FieldModel,
}

impl ValidatedConfig {
    pub fn regime(&self) -> Regime {
        self.config.regime
    }

    pub fn initial_density(&self) -> Vec<f64> {
        let (a, m) = (self.config.rho0_amplitude, self.config.rho0_mode as f64);
        self.grid.sample(|x| 1.0 + a * (2.0 * PI * m * x).cos())
    }

    pub fn initial_velocity(&self) -> Vec<f64> {
        let (b, m) = (self.config.u0_amplitude, self.config.u0_mode as f64);
        self.grid.sample(|x| b * (2.0 * PI * m * x).sin())
    }

    /// Same configuration with a different `epsilon`, time step and stride.
    pub fn with_epsilon(&self, epsilon: f64, dt: f64, stride: usize) -> Result<Self> {
        let mut c = self.config.clone();
        c.epsilon = epsilon;
        c.beta = None;
        c.sigma = None;
        c.dt = dt;
        c.snapshot_stride = stride;
        validate_config(c)
    }
}

fn positive(out: &mut Vec<ConfigViolation>, field: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        out.push(ConfigViolation::new(field, "must be positive and finite"));
    }
}

/// Checks every invariant of a parsed configuration and resolves its kernels.
pub fn validate_config(cfg: RunConfig) -> Result<ValidatedConfig> {
    let mut v = Vec::new();
    let params = cfg.params();
    v.extend(params.violations(cfg.regime));
    let grid = Grid1D::new(cfg.n_cells);
    if grid.is_err() {
        v.push(ConfigViolation::new("n_cells", "power of two required"));
    }
    if cfg.n_particles == 0 {
        v.push(ConfigViolation::new("n_particles", "must be at least 1"));
    }
    positive(&mut v, "dt", cfg.dt);
    if !(cfg.t_final.is_finite() && cfg.t_final >= cfg.dt) {
        v.push(ConfigViolation::new("t_final", "must be at least dt"));
    } else if cfg.dt > 0.0 {
        let steps = cfg.t_final / cfg.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            v.push(ConfigViolation::new("t_final", "must be an integer multiple of dt"));
        }
    }
    if cfg.snapshot_stride == 0 {
        v.push(ConfigViolation::new("snapshot_stride", "must be at least 1"));
    }
    let vgrid = VelocityGrid::new(cfg.v_min, cfg.v_max, cfg.n_v);
    if vgrid.is_err() {
        v.push(ConfigViolation::new("v_min", "velocity grid must satisfy v_min < v_max and n_v > 0"));
    }
    if cfg.n_x_bins == 0 {
        v.push(ConfigViolation::new("n_x_bins", "must be at least 1"));
    }
    if !(cfg.eps_reg.is_finite() && cfg.eps_reg >= 0.0) {
        v.push(ConfigViolation::new("eps_reg", "must be non-negative"));
    }
    if !(cfg.rho0_amplitude.is_finite() && cfg.rho0_amplitude.abs() < 1.0) {
        v.push(ConfigViolation::new("rho0_amplitude", "initial density must stay positive (|a| < 1)"));
    }
    if !cfg.u0_amplitude.is_finite() {
        v.push(ConfigViolation::new("u0_amplitude", "must be finite"));
    }
    if cfg.rho0_mode == 0 {
        v.push(ConfigViolation::new("rho0_mode", "must be at least 1"));
    }
    if cfg.u0_mode == 0 {
        v.push(ConfigViolation::new("u0_mode", "must be at least 1"));
    }
    if !(cfg.fluid_cfl > 0.0 && cfg.fluid_cfl <= 1.0) {
        v.push(ConfigViolation::new("fluid_cfl", "must lie in (0, 1]"));
    }
    if !cfg.potential_amplitude.is_finite() {
        v.push(ConfigViolation::new("potential_amplitude", "must be finite"));
    }
    if cfg.interaction == InteractionKind::Table && cfg.interaction_table.is_none() {
        v.push(ConfigViolation::new("interaction_table", "required when interaction = table"));
    }
    if cfg.weight == WeightKind::Table && cfg.weight_table.is_none() {
        v.push(ConfigViolation::new("weight_table", "required when weight = table"));
    }
    if cfg.weight == WeightKind::Cosine && !(cfg.weight_mean >= cfg.weight_amplitude.abs()) {
        v.push(ConfigViolation::new("weight_amplitude", "phi must be non-negative (|amplitude| <= mean)"));
    }
    if cfg.weight == WeightKind::Constant && !(cfg.weight_mean >= 0.0) {
        v.push(ConfigViolation::new("weight_mean", "phi must be non-negative"));
    }
    if !v.is_empty() {
        return Err(Error::Config(v));
    }
    let grid = grid?;
    let vgrid = vgrid?;

    let potential = match cfg.potential {
        PotentialKind::Zero => PotentialSpec::Zero,
        PotentialKind::CosineWell => PotentialSpec::CosineWell {
            amplitude: cfg.potential_amplitude,
        },
    };
    let interaction = match cfg.interaction {
        InteractionKind::None => InteractionSpec::None,
        InteractionKind::Coulomb => InteractionSpec::Coulomb,
        InteractionKind::Sine => {
            InteractionSpec::BoundedLipschitz(KernelTable::sine_mode(&grid, cfg.interaction_amplitude)?)
        }
        InteractionKind::Table => {
            let path = cfg.interaction_table.as_deref().expect("checked above");
            InteractionSpec::BoundedLipschitz(KernelTable::load_csv(path, &grid)?)
        }
    };
    let weight = match cfg.weight {
        WeightKind::Zero => WeightSpec::zero(&grid),
        WeightKind::Constant => WeightSpec::constant(&grid, cfg.weight_mean)?,
        WeightKind::Cosine => WeightSpec::cosine(&grid, cfg.weight_mean, cfg.weight_amplitude)?,
        WeightKind::Table => {
            let path = cfg.weight_table.as_deref().expect("checked above");
            WeightSpec::load_csv(path, &grid)?
        }
    };
    let fields = FieldModel::new(grid, potential, interaction, weight)?;
    let mut config = cfg;
    config.beta = Some(params.beta);
    config.sigma = Some(params.sigma);
    Ok(ValidatedConfig {
        params: ModelParams {
            beta: 1.0 / params.epsilon,
            sigma: if config.regime == Regime::Diffusive {
                1.0 / params.epsilon
            } else {
                0.0
            },
            ..params
        },
        config,
        grid,
        vgrid,
        fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(cfg: RunConfig) -> Vec<ConfigViolation> {
        match validate_config(cfg) {
            Err(Error::Config(v)) => v,
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => Vec::new(),
        }
    }

    #[test]
    fn diffusive_coupling_accepted() {
        let cfg = RunConfig {
            epsilon: 0.1,
            beta: Some(10.0),
            sigma: Some(10.0),
            ..RunConfig::default()
        };
        let ok = validate_config(cfg).unwrap();
        assert_eq!(ok.params.beta, 10.0);
        assert_eq!(ok.params.sigma, 10.0);
    }

    #[test]
    fn diffusionless_sigma_rejected() {
        let cfg = RunConfig {
            regime: Regime::Diffusionless,
            epsilon: 0.1,
            sigma: Some(0.5),
            ..RunConfig::default()
        };
        let v = violations(cfg);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "sigma");
        assert_eq!(v[0].message, "sigma must be 0");
    }

    #[test]
    fn non_power_of_two_rejected() {
        let v = violations(RunConfig {
            n_cells: 100,
            ..RunConfig::default()
        });
        assert_eq!(v[0].field, "n_cells");
        assert!(v[0].message.contains("power of two required"));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = RunConfig::from_json(r#"{"epsilon": 0.1, "bogus": 3}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let ok = RunConfig::from_json(r#"{"epsilon": 0.2, "regime": "diffusionless"}"#).unwrap();
        assert_eq!(ok.regime, Regime::Diffusionless);
        assert_eq!(ok.n_cells, 128);
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig {
            seed: u64::MAX - 3,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn every_single_mutation_is_rejected() {
        let base = RunConfig::default();
        assert!(validate_config(base.clone()).is_ok());
        let mutations: Vec<(&str, Box<dyn Fn(&mut RunConfig)>)> = vec![
            ("epsilon", Box::new(|c| c.epsilon = 0.0)),
            ("epsilon", Box::new(|c| c.epsilon = f64::NAN)),
            ("gamma", Box::new(|c| c.gamma = -1.0)),
            ("lambda", Box::new(|c| c.lambda = f64::INFINITY)),
            ("alpha", Box::new(|c| c.alpha = -0.1)),
            ("beta", Box::new(|c| c.beta = Some(3.0))),
            ("sigma", Box::new(|c| c.sigma = Some(0.0))),
            ("n_cells", Box::new(|c| c.n_cells = 96)),
            ("n_particles", Box::new(|c| c.n_particles = 0)),
            ("dt", Box::new(|c| c.dt = -0.1)),
            ("t_final", Box::new(|c| c.t_final = 0.001)),
            ("t_final", Box::new(|c| c.t_final = 0.5001)),
            ("snapshot_stride", Box::new(|c| c.snapshot_stride = 0)),
            ("v_min", Box::new(|c| c.v_min = 7.0)),
            ("n_x_bins", Box::new(|c| c.n_x_bins = 0)),
            ("eps_reg", Box::new(|c| c.eps_reg = -1e-3)),
            ("rho0_amplitude", Box::new(|c| c.rho0_amplitude = 1.2)),
            ("rho0_mode", Box::new(|c| c.rho0_mode = 0)),
            ("u0_mode", Box::new(|c| c.u0_mode = 0)),
            ("fluid_cfl", Box::new(|c| c.fluid_cfl = 1.5)),
            ("interaction_table", Box::new(|c| c.interaction = InteractionKind::Table)),
            ("weight_table", Box::new(|c| c.weight = WeightKind::Table)),
            ("weight_amplitude", Box::new(|c| c.weight_amplitude = 2.0)),
        ];
        for (field, mutate) in mutations {
            let mut c = base.clone();
            mutate(&mut c);
            let v = violations(c);
            assert!(
                v.iter().any(|x| x.field == field),
                "mutation of {field} not reported: {v:?}"
            );
        }
    }

    #[test]
    fn hash_tracks_numerics_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(a.numerics_hash(), b.numerics_hash());
        b.seed += 1;
        assert_ne!(a.numerics_hash(), b.numerics_hash());
    }
}
