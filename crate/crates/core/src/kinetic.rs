//! Stochastic particle solver for the kinetic equation.
//!
//! The density is represented by `N` equal-weight particles. Moments are
//! deposited on the grid with cloud-in-cell weights and grid fields are read
//! back with the matching linear interpolation, so deposition and
//! interpolation are adjoint and the discrete power balance closes exactly.
//! Time stepping is explicit Euler–Maruyama.
//!
//! Work is split into fixed-size particle chunks; per-chunk deposition
//! buffers are merged in chunk order and every particle draws from its own
//! counter-based stream, so results do not depend on the thread count.

use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::config::ValidatedConfig;
use crate::error::{Error, Result};
use crate::fields::{FieldModel, FieldSet};
use crate::model::{wrap_torus, Grid1D, ModelParams, ParticleEnsemble};
use crate::rng::{CounterStream, INIT_PHASE};

/// Particles per work unit.
const CHUNK: usize = 8192;

/// Speed above which a run is declared unstable.
pub const BLOW_UP_SPEED: f64 = 1e6;

/// Largest admissible `dt / epsilon`.
pub const STIFFNESS_RATIO: f64 = 0.5;

/// Grid moments of the particle density.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFields {
    pub rho: Vec<f64>,
    /// Regularized velocity `rho_u / (rho + eps_reg)`.
    pub u: Vec<f64>,
    pub rho_u: Vec<f64>,
    /// Local second moment `int v^2 f dv`.
    pub energy: Vec<f64>,
    pub eps_reg: f64,
}

/// Left-rectangle time integrals of the dissipation rates, without their
/// coefficients.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DissipationIntegrals {
    /// `int f |u - v|^2`, the local alignment rate.
    pub local: f64,
    /// `(1/2) int int phi |v - w|^2 f f`.
    pub d2: f64,
    /// `int |v|^2 f`.
    pub d3: f64,
    /// `int int phi rho rho`, the weight mass entering the free-energy source.
    pub weight_mass: f64,
}

#[derive(Debug, Clone)]
pub struct KineticSnapshot {
    pub step: usize,
    pub time: f64,
    pub ensemble: ParticleEnsemble,
    pub moments: MomentFields,
    pub fields: FieldSet,
    pub integrals: DissipationIntegrals,
}

impl KineticSnapshot {
    /// `(1/2) int |v|^2 f + lambda (1/2) int (W * rho) rho + lambda int V rho`.
    pub fn mechanical_energy(&self, model: &FieldModel, params: &ModelParams) -> f64 {
        0.5 * self.ensemble.second_moment()
            + params.lambda * (model.interaction_energy(&self.moments.rho) + model.potential_energy(&self.moments.rho))
    }
}

/// Samples the local Maxwellian of `(rho0, u0)`: positions by inverse CDF of
/// the piecewise-constant grid density, velocities `u0(x) + N(0, 1)`.
pub fn init_well_prepared(grid: &Grid1D, rho0: &[f64], u0: &[f64], n: usize, seed: u64) -> Result<ParticleEnsemble> {
    grid.check_len(rho0)?;
    grid.check_len(u0)?;
    let min = rho0.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::DegenerateDensity { min });
    }
    let total: f64 = rho0.iter().sum();
    let mut cdf = Vec::with_capacity(rho0.len() + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for r in rho0 {
        acc += r / total;
        cdf.push(acc);
    }
    let h = grid.cell_width();
    let last = rho0.len() - 1;
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let (positions, velocities): (Vec<f64>, Vec<f64>) = (0..n)
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|i| {
            let mut rng = CounterStream::at(seed, i as u64, INIT_PHASE);
            let p: f64 = unit.sample(&mut rng);
            let xi: f64 = StandardNormal.sample(&mut rng);
            let j = (cdf.partition_point(|&c| c <= p) - 1).min(last);
            let frac = ((p - cdf[j]) / (cdf[j + 1] - cdf[j])).clamp(0.0, 1.0);
            let x = wrap_torus((j as f64 + frac) * h);
            (x, grid.interpolate(u0, x) + xi)
        })
        .unzip();
    ParticleEnsemble::new(positions, velocities, seed)
}

/// Cloud-in-cell deposition of mass, momentum and second moment.
pub fn estimate_moments(ensemble: &ParticleEnsemble, grid: &Grid1D, eps_reg: f64) -> MomentFields {
    let n = grid.n_cells();
    let scale = ensemble.weight() / grid.cell_width();
    let partial: Vec<Vec<f64>> = ensemble
        .positions
        .par_chunks(CHUNK)
        .zip(ensemble.velocities.par_chunks(CHUNK))
        .map(|(xs, vs)| {
            // interleaved [rho, rho_u, energy] per cell
            let mut buf = vec![0.0; 3 * n];
            for (&x, &v) in xs.iter().zip(vs) {
                let (l, r, t) = grid.locate(x);
                for (j, w) in [(l, 1.0 - t), (r, t)] {
                    buf[3 * j] += w;
                    buf[3 * j + 1] += w * v;
                    buf[3 * j + 2] += w * v * v;
                }
            }
            buf
        })
        .collect();
    let mut sum = vec![0.0; 3 * n];
    for buf in &partial {
        for (s, b) in sum.iter_mut().zip(buf) {
            *s += b;
        }
    }
    let rho: Vec<f64> = (0..n).map(|j| sum[3 * j] * scale).collect();
    let rho_u: Vec<f64> = (0..n).map(|j| sum[3 * j + 1] * scale).collect();
    let energy: Vec<f64> = (0..n).map(|j| sum[3 * j + 2] * scale).collect();
    let u = rho.iter().zip(&rho_u).map(|(r, m)| regularized(*m, *r, eps_reg)).collect();
    MomentFields {
        rho,
        u,
        rho_u,
        energy,
        eps_reg,
    }
}

#[inline]
fn regularized(momentum: f64, density: f64, eps_reg: f64) -> f64 {
    let d = density + eps_reg;
    if d > 0.0 {
        momentum / d
    } else {
        0.0
    }
}

/// Per-particle drift of the kinetic equation.
pub fn assemble_accelerations(
    ensemble: &ParticleEnsemble,
    moments: &MomentFields,
    fields: &FieldSet,
    params: &ModelParams,
    grid: &Grid1D,
) -> Vec<f64> {
    // fold every x-only term into two grid functions: a = c0(x) - c1(x) v
    let c0: Vec<f64> = (0..grid.n_cells())
        .map(|j| {
            -params.lambda * (fields.grad_v[j] + fields.grad_w_conv_rho[j])
                + params.alpha * fields.phi_conv_rho_u[j]
                + params.beta * moments.u[j]
        })
        .collect();
    let c1: Vec<f64> = fields
        .phi_conv_rho
        .iter()
        .map(|p| params.gamma + params.alpha * p + params.beta)
        .collect();
    ensemble
        .positions
        .par_iter()
        .zip(ensemble.velocities.par_iter())
        .with_min_len(CHUNK)
        .map(|(&x, &v)| {
            let (l, r, t) = grid.locate(x);
            let a0 = c0[l] * (1.0 - t) + c0[r] * t;
            let a1 = c1[l] * (1.0 - t) + c1[r] * t;
            a0 - a1 * v
        })
        .collect()
}

/// One Euler–Maruyama step; noise for step `step` comes from each particle's
/// stream at that counter block.
pub fn step_euler_maruyama(ensemble: &mut ParticleEnsemble, accels: &[f64], dt: f64, sigma: f64, step: u64) {
    let amp = (2.0 * sigma * dt).sqrt();
    let seed = ensemble.seed;
    let ParticleEnsemble {
        positions, velocities, ..
    } = ensemble;
    positions
        .par_chunks_mut(CHUNK)
        .zip(velocities.par_chunks_mut(CHUNK))
        .zip(accels.par_chunks(CHUNK))
        .enumerate()
        .for_each(|(c, ((xs, vs), as_))| {
            for (k, ((x, v), a)) in xs.iter_mut().zip(vs.iter_mut()).zip(as_).enumerate() {
                *x = wrap_torus(*x + *v * dt);
                let mut nv = *v + a * dt;
                if amp > 0.0 {
                    let i = (c * CHUNK + k) as u64;
                    let xi: f64 = StandardNormal.sample(&mut CounterStream::at(seed, i, step));
                    nv += amp * xi;
                }
                *v = nv;
            }
        });
}

/// Instantaneous dissipation rates from one snapshot's moments and fields.
pub fn dissipation_rates(
    ensemble: &ParticleEnsemble,
    moments: &MomentFields,
    fields: &FieldSet,
    grid: &Grid1D,
) -> DissipationIntegrals {
    let h = grid.cell_width();
    let w = ensemble.weight();
    let d3 = ensemble.second_moment();
    let projected: f64 = moments
        .rho_u
        .iter()
        .zip(&moments.rho)
        .map(|(m, r)| m * regularized(*m, *r, moments.eps_reg))
        .sum::<f64>()
        * h;
    let weighted_v2: f64 = ensemble
        .positions
        .par_chunks(CHUNK)
        .zip(ensemble.velocities.par_chunks(CHUNK))
        .map(|(xs, vs)| {
            xs.iter()
                .zip(vs)
                .map(|(&x, &v)| v * v * grid.interpolate(&fields.phi_conv_rho, x))
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        * w;
    let cross: f64 = moments
        .rho_u
        .iter()
        .zip(&fields.phi_conv_rho_u)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * h;
    let weight_mass: f64 = moments.rho.iter().zip(&fields.phi_conv_rho).map(|(a, b)| a * b).sum::<f64>() * h;
    DissipationIntegrals {
        local: d3 - projected,
        d2: weighted_v2 - cross,
        d3,
        weight_mass,
    }
}

/// Output of [`run_kinetic`].
#[derive(Debug, Clone)]
pub struct KineticRun {
    pub snapshots: Vec<KineticSnapshot>,
}

/// Steps the particle system of `cfg`, handing every `snapshot_stride`-th
/// state (and the final one) to `observe`.
pub fn run_kinetic_with(
    cfg: &ValidatedConfig,
    mut observe: impl FnMut(&KineticSnapshot) -> Result<()>,
) -> Result<()> {
    let c = &cfg.config;
    let params = &cfg.params;
    let limit = STIFFNESS_RATIO * params.epsilon;
    if c.dt > limit {
        return Err(Error::Stiffness { dt: c.dt, limit });
    }
    let mut ensemble = init_well_prepared(
        &cfg.grid,
        &cfg.initial_density(),
        &cfg.initial_velocity(),
        c.n_particles,
        c.seed,
    )?;
    let n_steps = c.n_steps();
    let mut integrals = DissipationIntegrals::default();
    for step in 0..=n_steps {
        let time = step as f64 * c.dt;
        let moments = estimate_moments(&ensemble, &cfg.grid, c.eps_reg);
        let fields = cfg.fields.compute(&moments.rho, &moments.rho_u).map_err(|e| match e {
            Error::NonFiniteState { .. } => Error::NonFiniteState { time },
            other => other,
        })?;
        if step % c.snapshot_stride == 0 || step == n_steps {
            observe(&KineticSnapshot {
                step,
                time,
                ensemble: ensemble.clone(),
                moments: moments.clone(),
                fields: fields.clone(),
                integrals,
            })?;
        }
        if step == n_steps {
            break;
        }
        let rates = dissipation_rates(&ensemble, &moments, &fields, &cfg.grid);
        integrals.local += rates.local * c.dt;
        integrals.d2 += rates.d2 * c.dt;
        integrals.d3 += rates.d3 * c.dt;
        integrals.weight_mass += rates.weight_mass * c.dt;
        let accels = assemble_accelerations(&ensemble, &moments, &fields, params, &cfg.grid);
        step_euler_maruyama(&mut ensemble, &accels, c.dt, params.sigma, step as u64);
        let speed = ensemble.max_speed();
        if !speed.is_finite() {
            return Err(Error::NonFiniteState {
                time: time + c.dt,
            });
        }
        if speed > BLOW_UP_SPEED {
            return Err(Error::BlowUp {
                time: time + c.dt,
                speed,
            });
        }
    }
    Ok(())
}

/// Runs the particle system and keeps every snapshot in memory.
pub fn run_kinetic(cfg: &ValidatedConfig) -> Result<KineticRun> {
    let mut snapshots = Vec::new();
    run_kinetic_with(cfg, |s| {
        snapshots.push(s.clone());
        Ok(())
    })?;
    Ok(KineticRun { snapshots })
}
