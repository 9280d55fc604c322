//! Domain types shared by the solvers and the metrics: coefficient tuple,
//! periodic grids, particle ensembles and fluid states.
//!
//! Everything lives on the one-dimensional unit torus `[0, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigViolation, Error, Result};

/// Scaling regime of the local alignment / diffusion operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `beta = sigma = 1/epsilon`; the limit is isothermal Euler.
    Diffusive,
    /// `beta = 1/epsilon`, `sigma = 0`; the limit is pressureless Euler.
    Diffusionless,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Diffusive => "diffusive",
            Regime::Diffusionless => "diffusionless",
        }
    }
}

/// Coefficients of the kinetic equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Linear damping.
    pub gamma: f64,
    /// Coupling of the confinement and interaction potentials.
    pub lambda: f64,
    /// Nonlocal (Cucker-Smale) alignment.
    pub alpha: f64,
    /// Local alignment strength.
    pub beta: f64,
    /// Velocity diffusion.
    pub sigma: f64,
    /// Singular parameter.
    pub epsilon: f64,
}

impl ModelParams {
    /// Builds the coefficient tuple for a regime, deriving `beta` and `sigma`
    /// from `epsilon`.
    pub fn for_regime(regime: Regime, epsilon: f64, gamma: f64, lambda: f64, alpha: f64) -> Self {
        let beta = 1.0 / epsilon;
        let sigma = match regime {
            Regime::Diffusive => beta,
            Regime::Diffusionless => 0.0,
        };
        Self {
            gamma,
            lambda,
            alpha,
            beta,
            sigma,
            epsilon,
        }
    }

    /// Checks the coefficient invariants for `regime`; returns every violation.
    pub fn violations(&self, regime: Regime) -> Vec<ConfigViolation> {
        let mut out = Vec::new();
        let named = [
            ("gamma", self.gamma),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("epsilon", self.epsilon),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                out.push(ConfigViolation::new(name, "must be finite"));
            } else if value < 0.0 {
                out.push(ConfigViolation::new(name, "must be non-negative"));
            }
        }
        if !(self.epsilon > 0.0) {
            out.push(ConfigViolation::new("epsilon", "must be positive"));
            return out;
        }
        let inv = 1.0 / self.epsilon;
        if !close_rel(self.beta, inv) {
            out.push(ConfigViolation::new("beta", "must equal 1/epsilon"));
        }
        match regime {
            Regime::Diffusive => {
                if !close_rel(self.sigma, inv) {
                    out.push(ConfigViolation::new(
                        "sigma",
                        "must equal 1/epsilon in the diffusive regime",
                    ));
                }
            }
            Regime::Diffusionless => {
                if self.sigma != 0.0 {
                    out.push(ConfigViolation::new("sigma", "sigma must be 0"));
                }
            }
        }
        out
    }

    /// Ratio `sigma / beta` in front of the entropy in the free energy.
    pub fn temperature(&self) -> f64 {
        if self.beta > 0.0 {
            self.sigma / self.beta
        } else {
            0.0
        }
    }
}

fn close_rel(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

/// Maps `x` onto the torus `[0, 1)`.
#[inline]
pub fn wrap_torus(x: f64) -> f64 {
    let r = x - x.floor();
    // x slightly below an integer rounds up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `x - y` in `[-1/2, 1/2)`.
#[inline]
pub fn disp(x: f64, y: f64) -> f64 {
    let d = x - y;
    let r = d - (d + 0.5).floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Uniform periodic grid on the unit torus with cell centers `(j + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid1D {
    n_cells: usize,
}

impl Grid1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 4 || !n_cells.is_power_of_two() {
            return Err(Error::Config(vec![ConfigViolation::new(
                "n_cells",
                "power of two required (at least 4)",
            )]));
        }
        Ok(Self { n_cells })
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn length(&self) -> f64 {
        1.0
    }

    #[inline]
    pub fn cell_width(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.cell_width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }

    /// Lag points `m h`, `m = 0..n`, at which convolution kernels are sampled.
    pub fn lags(&self) -> Vec<f64> {
        let h = self.cell_width();
        (0..self.n_cells).map(|m| m as f64 * h).collect()
    }

    #[inline]
    pub fn wrap_index(&self, j: isize) -> usize {
        j.rem_euclid(self.n_cells as isize) as usize
    }

    /// Left neighbouring cell center of `x` and the linear weight of the right one.
    #[inline]
    pub fn locate(&self, x: f64) -> (usize, usize, f64) {
        let s = x * self.n_cells as f64 - 0.5;
        let fl = s.floor();
        let theta = s - fl;
        let left = self.wrap_index(fl as isize);
        let right = if left + 1 == self.n_cells { 0 } else { left + 1 };
        (left, right, theta)
    }

    /// Linear interpolation of a grid function between cell centers.
    #[inline]
    pub fn interpolate(&self, field: &[f64], x: f64) -> f64 {
        let (l, r, t) = self.locate(x);
        field[l] * (1.0 - t) + field[r] * t
    }

    /// Evaluates `f` at every cell center.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_cells).map(|j| f(self.center(j))).collect()
    }

    /// Rectangle-rule integral of a grid function.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() * self.cell_width()
    }

    pub fn mean(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() / self.n_cells as f64
    }

    pub fn check_len(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.n_cells {
            return Err(Error::ShapeMismatch {
                expected: self.n_cells,
                got: field.len(),
            });
        }
        Ok(())
    }
}

/// Velocity window used for phase-space histograms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    pub v_min: f64,
    pub v_max: f64,
    pub n_v: usize,
}

impl VelocityGrid {
    pub fn new(v_min: f64, v_max: f64, n_v: usize) -> Result<Self> {
        if !(v_min.is_finite() && v_max.is_finite() && v_max > v_min) || n_v == 0 {
            return Err(Error::Config(vec![ConfigViolation::new(
                "v_min/v_max/n_v",
                "velocity grid must satisfy v_min < v_max and n_v > 0",
            )]));
        }
        Ok(Self { v_min, v_max, n_v })
    }

    #[inline]
    pub fn cell_width(&self) -> f64 {
        (self.v_max - self.v_min) / self.n_v as f64
    }

    #[inline]
    pub fn center(&self, k: usize) -> f64 {
        self.v_min + (k as f64 + 0.5) * self.cell_width()
    }

    /// Bin index of `v`, or `None` when it falls outside the window.
    #[inline]
    pub fn bin(&self, v: f64) -> Option<usize> {
        if v < self.v_min || v >= self.v_max {
            return None;
        }
        let k = ((v - self.v_min) / self.cell_width()) as usize;
        Some(k.min(self.n_v - 1))
    }
}

/// Equal-weight phase-space samples representing the kinetic density.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    /// Root seed of the per-particle random streams.
    pub seed: u64,
}

impl ParticleEnsemble {
    pub fn new(positions: Vec<f64>, velocities: Vec<f64>, seed: u64) -> Result<Self> {
        if positions.len() != velocities.len() {
            return Err(Error::ShapeMismatch {
                expected: positions.len(),
                got: velocities.len(),
            });
        }
        if positions.is_empty() {
            return Err(Error::Domain("ensemble must contain particles".into()));
        }
        let positions = positions.into_iter().map(wrap_torus).collect();
        Ok(Self {
            positions,
            velocities,
            seed,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    #[inline]
    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn mean_velocity(&self) -> f64 {
        self.velocities.iter().sum::<f64>() * self.weight()
    }

    pub fn second_moment(&self) -> f64 {
        self.velocities.iter().map(|v| v * v).sum::<f64>() * self.weight()
    }

    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Unknowns of a limit system on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum FluidVariant {
    /// `g = log(rho)`.
    Isothermal { g: Vec<f64>, u: Vec<f64> },
    /// `g = rho - 1`.
    Pressureless { g: Vec<f64>, u: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub variant: FluidVariant,
    pub time: f64,
}

impl FluidState {
    /// Builds the reformulated state from a density and velocity.
    pub fn from_primitive(regime: Regime, rho: &[f64], u: &[f64], time: f64) -> Result<Self> {
        if rho.len() != u.len() {
            return Err(Error::ShapeMismatch {
                expected: rho.len(),
                got: u.len(),
            });
        }
        let variant = match regime {
            Regime::Diffusive => {
                if let Some(&m) = rho.iter().find(|r| !(**r > 0.0)) {
                    return Err(Error::DegenerateDensity { min: m });
                }
                FluidVariant::Isothermal {
                    g: rho.iter().map(|r| r.ln()).collect(),
                    u: u.to_vec(),
                }
            }
            Regime::Diffusionless => FluidVariant::Pressureless {
                g: rho.iter().map(|r| r - 1.0).collect(),
                u: u.to_vec(),
            },
        };
        Ok(Self { variant, time })
    }

    pub fn regime(&self) -> Regime {
        match self.variant {
            FluidVariant::Isothermal { .. } => Regime::Diffusive,
            FluidVariant::Pressureless { .. } => Regime::Diffusionless,
        }
    }

    pub fn density(&self) -> Vec<f64> {
        match &self.variant {
            FluidVariant::Isothermal { g, .. } => g.iter().map(|x| x.exp()).collect(),
            FluidVariant::Pressureless { g, .. } => g.iter().map(|x| 1.0 + x).collect(),
        }
    }

    pub fn g(&self) -> &[f64] {
        match &self.variant {
            FluidVariant::Isothermal { g, .. } | FluidVariant::Pressureless { g, .. } => g,
        }
    }

    pub fn velocity(&self) -> &[f64] {
        match &self.variant {
            FluidVariant::Isothermal { u, .. } | FluidVariant::Pressureless { u, .. } => u,
        }
    }

    pub fn len(&self) -> usize {
        self.velocity().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn with_parts(&self, g: Vec<f64>, u: Vec<f64>, time: f64) -> Self {
        let variant = match self.variant {
            FluidVariant::Isothermal { .. } => FluidVariant::Isothermal { g, u },
            FluidVariant::Pressureless { .. } => FluidVariant::Pressureless { g, u },
        };
        Self { variant, time }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_examples() {
        assert!((wrap_torus(1.25) - 0.25).abs() < 1e-15);
        assert!((wrap_torus(-0.1) - 0.9).abs() < 1e-15);
        assert_eq!(wrap_torus(-1e-18), 0.0);
        assert!((disp(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(disp(0.75, 0.25), -0.5);
    }

    #[test]
    fn grid_requires_power_of_two() {
        let err = Grid1D::new(100).unwrap_err();
        assert!(err.to_string().contains("power of two required"));
        assert!(Grid1D::new(128).is_ok());
    }

    #[test]
    fn interpolation_hits_nodes_and_wraps() {
        let g = Grid1D::new(8).unwrap();
        let f: Vec<f64> = (0..8).map(|j| j as f64).collect();
        assert_eq!(g.interpolate(&f, g.center(3)), 3.0);
        // halfway between the last and first centers
        assert!((g.interpolate(&f, 0.0) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn regime_rules() {
        let p = ModelParams::for_regime(Regime::Diffusive, 0.1, 0.0, 1.0, 1.0);
        assert!(p.violations(Regime::Diffusive).is_empty());
        assert_eq!(p.beta, 10.0);
        let mut q = ModelParams::for_regime(Regime::Diffusionless, 0.1, 0.0, 1.0, 1.0);
        q.sigma = 0.5;
        let v = q.violations(Regime::Diffusionless);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "sigma must be 0");
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent(x in -1e6f64..1e6) {
            let w = wrap_torus(x);
            prop_assert!((0.0..1.0).contains(&w));
            prop_assert_eq!(wrap_torus(w), w);
        }

        #[test]
        fn disp_is_antisymmetric(x in -10f64..10.0, y in -10f64..10.0) {
            let a = disp(x, y);
            let b = disp(y, x);
            prop_assert!(a.abs() <= 0.5 && b.abs() <= 0.5);
            // the representative -1/2 maps to itself, otherwise a = -b
            prop_assert!((a + b).abs() < 1e-9 || ((a + b).abs() - 1.0).abs() < 1e-9);
        }
    }
}
