//! Relative entropies and energy-type gaps between kinetic moments and a
//! fluid state.

use crate::error::{Error, Result};
use crate::fields::mul;
use crate::model::Grid1D;
use crate::spectral::Spectral;

/// `H(a|b) = a log a - b log b - (1 + log b)(a - b)`, evaluated as
/// `a log(a/b) - a + b`; `a = 0` gives the limit value `b`.
pub fn rel_entropy_pointwise(a: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("relative entropy needs b > 0, got {b}")));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("relative entropy needs a >= 0, got {a}")));
    }
    if a == 0.0 {
        return Ok(b);
    }
    Ok(a * (a / b).ln() - a + b)
}

/// `int H(a|b)` on the grid.
pub fn integrated_entropy(grid: &Grid1D, a: &[f64], b: &[f64]) -> Result<f64> {
    grid.check_len(a)?;
    grid.check_len(b)?;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += rel_entropy_pointwise(*x, *y)?;
    }
    Ok(sum * grid.cell_width())
}

/// Components of the gap between kinetic moments `(rho_e, u_e)` and a
/// fluid state `(rho, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidGap {
    /// `int rho_e / 2 |u_e - u|^2`.
    pub e_hat: f64,
    /// `int H(rho_e | rho)`.
    pub h_forward: f64,
    /// `int H(rho | rho_e)`; absent when `rho_e` vanishes somewhere.
    pub h_reverse: Option<f64>,
    /// `e_hat + h_forward`.
    pub e: f64,
    /// `||rho_e - rho||_{L1}`.
    pub l1_density: f64,
    /// Left side of `||rho_e - rho||^2 <= 2 (||rho_e|| + ||rho||) int H(rho_e|rho)`.
    pub est_l1_lhs: f64,
    pub est_l1_rhs: f64,
}

/// Relative entropy and modulated kinetic energy of the kinetic moments
/// against a fluid state with `rho > 0`.
pub fn fluid_relative_entropy(grid: &Grid1D, rho_e: &[f64], u_e: &[f64], rho: &[f64], u: &[f64]) -> Result<FluidGap> {
    for f in [rho_e, u_e, rho, u] {
        if f.len() != grid.n_cells() {
            return Err(Error::GridMismatch(grid.n_cells(), f.len()));
        }
    }
    let h = grid.cell_width();
    let e_hat = 0.5
        * h
        * rho_e
            .iter()
            .zip(u_e.iter().zip(u))
            .map(|(r, (a, b))| r * (a - b) * (a - b))
            .sum::<f64>();
    let h_forward = integrated_entropy(grid, rho_e, rho)?;
    let h_reverse = if rho_e.iter().all(|r| *r > 0.0) {
        Some(integrated_entropy(grid, rho, rho_e)?)
    } else {
        None
    };
    let l1_density = h * rho_e.iter().zip(rho).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let mass = |f: &[f64]| h * f.iter().map(|x| x.abs()).sum::<f64>();
    Ok(FluidGap {
        e_hat,
        h_forward,
        h_reverse,
        e: e_hat + h_forward,
        l1_density,
        est_l1_lhs: l1_density * l1_density,
        est_l1_rhs: 2.0 * (mass(rho_e) + mass(rho)) * h_forward,
    })
}

/// `(lambda/2) int |grad W * (rho - rho_e)|^2` for the torus Coulomb kernel.
pub fn coulomb_gap(spectral: &Spectral, rho_e: &[f64], rho: &[f64], lambda: f64) -> Result<f64> {
    let n = rho.len();
    if rho_e.len() != n || spectral.len() != n {
        return Err(Error::GridMismatch(n, rho_e.len()));
    }
    for f in [rho_e, rho] {
        let mean = f.iter().sum::<f64>() / n as f64;
        if (mean - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitMass { mean });
        }
    }
    let diff: Vec<f64> = rho.iter().zip(rho_e).map(|(a, b)| a - b).collect();
    let field = spectral.poisson_gradient(&diff);
    Ok(0.5 * lambda * field.iter().map(|x| x * x).sum::<f64>() / n as f64)
}

/// `gamma int rho_e |u_e - u|^2` and
/// `(alpha/2) int int phi rho_e rho_e |w(x) - w(y)|^2` with `w = u_e - u`.
pub fn gap_dissipation_rates(
    grid: &Grid1D,
    phi_conv: impl Fn(&[f64]) -> Vec<f64>,
    rho_e: &[f64],
    u_e: &[f64],
    u: &[f64],
    gamma: f64,
    alpha: f64,
) -> (f64, f64) {
    let w: Vec<f64> = u_e.iter().zip(u).map(|(a, b)| a - b).collect();
    let rw = mul(rho_e, &w);
    let rw2 = mul(&rw, &w);
    let damping = gamma * grid.integrate(&rw2);
    let phi_rho = phi_conv(rho_e);
    let phi_rw = phi_conv(&rw);
    let align = grid.integrate(&mul(&phi_rho, &rw2)) - grid.integrate(&mul(&phi_rw, &rw));
    (damping, alpha * align)
}
