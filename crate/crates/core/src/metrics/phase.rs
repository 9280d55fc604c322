//! Phase-space functionals estimated from an `(x, v)` histogram of the
//! particles: free energy, the `D1` diagnostic and the `L1` distance to the
//! local Maxwellian of a fluid state.
//!
//! The entropy `int f log f` is the plug-in histogram estimate with the
//! Miller–Madow correction `(K - 1) / (2N)` for `K` occupied cells; the
//! remaining bias is `O(h_v^2)` from binning.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::kinetic::{dissipation_rates, MomentFields};
use crate::fields::FieldSet;
use crate::model::{Grid1D, ModelParams, ParticleEnsemble, VelocityGrid};

/// Largest fraction of particles allowed outside the velocity window.
pub const MAX_OUTSIDE: f64 = 1e-3;

/// Normalized `(x, v)` histogram: `density[i * n_v + k]` approximates `f`
/// on spatial bin `i` and velocity bin `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistogram {
    pub n_x: usize,
    pub vgrid: VelocityGrid,
    pub counts: Vec<u64>,
    pub outside: u64,
    pub total: u64,
}

impl PhaseHistogram {
    pub fn build(ensemble: &ParticleEnsemble, n_x: usize, vgrid: VelocityGrid) -> Result<Self> {
        let mut counts = vec![0u64; n_x * vgrid.n_v];
        let mut outside = 0u64;
        for (&x, &v) in ensemble.positions.iter().zip(&ensemble.velocities) {
            let i = ((x * n_x as f64) as usize).min(n_x - 1);
            match vgrid.bin(v) {
                Some(k) => counts[i * vgrid.n_v + k] += 1,
                None => outside += 1,
            }
        }
        let total = ensemble.len() as u64;
        let fraction = outside as f64 / total as f64;
        if fraction > MAX_OUTSIDE {
            return Err(Error::VGridTooNarrow { fraction });
        }
        Ok(Self {
            n_x,
            vgrid,
            counts,
            outside,
            total,
        })
    }

    pub fn hx(&self) -> f64 {
        1.0 / self.n_x as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.vgrid.cell_width()
    }

    pub fn density(&self, i: usize, k: usize) -> f64 {
        self.counts[i * self.vgrid.n_v + k] as f64 / (self.total as f64 * self.cell_area())
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx()
    }

    /// `int f log f` with the Miller–Madow correction.
    pub fn entropy(&self) -> f64 {
        let n = self.total as f64;
        let area = self.cell_area();
        let mut plug_in = 0.0;
        let mut occupied = 0usize;
        for &c in &self.counts {
            if c > 0 {
                let p = c as f64 / n;
                plug_in += p * (p / area).ln();
                occupied += 1;
            }
        }
        plug_in - (occupied.saturating_sub(1)) as f64 / (2.0 * n)
    }

    /// `int (1/f) |T d_v f - f (u - v)|^2` with centered velocity differences
    /// on the histogram; a qualitative diagnostic only.
    pub fn d1_diagnostic(&self, grid: &Grid1D, u: &[f64], temperature: f64) -> f64 {
        let nv = self.vgrid.n_v;
        let hv = self.vgrid.cell_width();
        let mut sum = 0.0;
        for i in 0..self.n_x {
            let ui = grid.interpolate(u, self.x_center(i));
            for k in 0..nv {
                let f = self.density(i, k);
                if f <= 0.0 {
                    continue;
                }
                let lo = if k > 0 { self.density(i, k - 1) } else { 0.0 };
                let hi = if k + 1 < nv { self.density(i, k + 1) } else { 0.0 };
                let dfdv = (hi - lo) / (2.0 * hv);
                let r = temperature * dfdv - f * (ui - self.vgrid.center(k));
                sum += r * r / f;
            }
        }
        sum * self.cell_area()
    }
}

/// Free energy and dissipations of one particle snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergy {
    /// `(sigma/beta) int f log f + kinetic + potential + interaction`.
    pub free_energy: f64,
    /// Histogram estimate of `int f log f`.
    pub entropy: f64,
    /// `(1/2) int |v|^2 f`.
    pub kinetic: f64,
    /// `lambda int V rho`.
    pub potential: f64,
    /// `(lambda/2) int int W rho rho`.
    pub interaction: f64,
    pub d1_diag: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Free energy with the histogram entropy and `D2`, `D3` from the particles.
pub fn free_energy_and_dissipations(
    ensemble: &ParticleEnsemble,
    moments: &MomentFields,
    fields: &FieldSet,
    model: &FieldModel,
    params: &ModelParams,
    vgrid: VelocityGrid,
    n_x: usize,
) -> Result<FreeEnergy> {
    let grid = model.grid();
    let hist = PhaseHistogram::build(ensemble, n_x, vgrid)?;
    let rates = dissipation_rates(ensemble, moments, fields, grid);
    let entropy = hist.entropy();
    let kinetic = 0.5 * rates.d3;
    let potential = params.lambda * model.potential_energy(&moments.rho);
    let interaction = params.lambda * model.interaction_energy(&moments.rho);
    let t = params.temperature();
    Ok(FreeEnergy {
        free_energy: t * entropy + kinetic + potential + interaction,
        entropy,
        kinetic,
        potential,
        interaction,
        d1_diag: hist.d1_diagnostic(grid, &moments.u, t),
        d2: rates.d2,
        d3: rates.d3,
    })
}

/// `rho (2 pi)^{-1/2} exp(-(v - u)^2 / 2)`.
#[inline]
pub fn maxwellian(rho: f64, u: f64, v: f64) -> f64 {
    rho * (-(v - u) * (v - u) / 2.0).exp() / (2.0 * PI).sqrt()
}

/// `||hist(f) - M_{rho,u}||_{L1}` over the histogram cells, plus the mass of
/// either side that falls outside the velocity window.
pub fn l1_maxwellian_gap(
    ensemble: &ParticleEnsemble,
    grid: &Grid1D,
    rho: &[f64],
    u: &[f64],
    vgrid: VelocityGrid,
    n_x: usize,
) -> Result<f64> {
    grid.check_len(rho)?;
    grid.check_len(u)?;
    let hist = PhaseHistogram::build(ensemble, n_x, vgrid)?;
    let area = hist.cell_area();
    let mut gap = 0.0;
    let mut m_mass = 0.0;
    for i in 0..n_x {
        let x = hist.x_center(i);
        let (r, ui) = (grid.interpolate(rho, x), grid.interpolate(u, x));
        for k in 0..vgrid.n_v {
            let m = maxwellian(r, ui, vgrid.center(k));
            m_mass += m * area;
            gap += (hist.density(i, k) - m).abs() * area;
        }
    }
    let outside_f = hist.outside as f64 / hist.total as f64;
    let outside_m = (grid.integrate(rho) - m_mass).max(0.0);
    Ok(gap + outside_f + outside_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxwellian_cell_sum_is_normalized() {
        let vg = VelocityGrid::new(-6.0, 6.0, 64).unwrap();
        let g = Grid1D::new(64).unwrap();
        let rho = g.sample(|x| 1.0 + 0.3 * (2.0 * PI * x).cos());
        let u = g.sample(|x| 0.2 * (2.0 * PI * x).sin());
        let mut s = 0.0;
        for i in 0..64 {
            let x = (i as f64 + 0.5) / 64.0;
            for k in 0..64 {
                s += maxwellian(g.interpolate(&rho, x), g.interpolate(&u, x), vg.center(k)) * vg.cell_width() / 64.0;
            }
        }
        assert!((s - 1.0).abs() < 1e-3, "{s}");
    }

    #[test]
    fn narrow_window_rejected() {
        let e = ParticleEnsemble::new(vec![0.5; 10], vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.0], 0).unwrap();
        let vg = VelocityGrid::new(-6.0, 6.0, 8).unwrap();
        assert!(matches!(PhaseHistogram::build(&e, 4, vg), Err(Error::VGridTooNarrow { .. })));
    }
}
