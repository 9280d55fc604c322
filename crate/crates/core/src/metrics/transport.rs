//! Transport distances between measures on the unit torus.
//!
//! Measures are collections of atoms. Grid densities are read as atoms of
//! mass `rho_j h` at the cell centers, so every distance here is exact for
//! the discrete measures it receives.
//!
//! `W1` uses the circular CDF formula: with `D` the cumulative signed mass
//! between consecutive atoms, `W1 = min_c sum_k len_k |D_k - c|`, minimized
//! by a weighted median of `D`. `d_BL` is the value of a linear program over
//! test values at the atoms.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::model::{wrap_torus, Grid1D};

/// Relative tolerance on the total-mass comparison.
const MASS_TOL: f64 = 1e-9;

/// Signed measure `sum_k mass_k delta(point_k)` sorted by position, with
/// coincident atoms merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedAtoms {
    pub points: Vec<f64>,
    pub mass: Vec<f64>,
}

impl SignedAtoms {
    pub fn new(points: &[f64], mass: &[f64]) -> Result<Self> {
        if points.len() != mass.len() {
            return Err(Error::ShapeMismatch {
                expected: points.len(),
                got: mass.len(),
            });
        }
        let mut pairs: Vec<(f64, f64)> = points.iter().map(|p| wrap_torus(*p)).zip(mass.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out = SignedAtoms {
            points: Vec::with_capacity(pairs.len()),
            mass: Vec::with_capacity(pairs.len()),
        };
        for (p, m) in pairs {
            match out.points.last() {
                Some(&q) if q == p => *out.mass.last_mut().expect("non-empty") += m,
                _ => {
                    out.points.push(p);
                    out.mass.push(m);
                }
            }
        }
        Ok(out)
    }

    /// `mu - nu` for two measures on shared points.
    pub fn difference(points: &[f64], mu: &[f64], nu: &[f64]) -> Result<Self> {
        if mu.len() != nu.len() {
            return Err(Error::ShapeMismatch {
                expected: mu.len(),
                got: nu.len(),
            });
        }
        let d: Vec<f64> = mu.iter().zip(nu).map(|(a, b)| a - b).collect();
        Self::new(points, &d)
    }

    /// Cell-center atoms of a grid function difference, weighted by `h`.
    pub fn from_grid(grid: &Grid1D, f1: &[f64], f2: &[f64]) -> Result<Self> {
        grid.check_len(f1)?;
        grid.check_len(f2)?;
        let h = grid.cell_width();
        let d: Vec<f64> = f1.iter().zip(f2).map(|(a, b)| (a - b) * h).collect();
        Self::new(&grid.centers(), &d)
    }

    /// Arc lengths from each atom to the next one around the circle.
    fn gaps(&self) -> Vec<f64> {
        let n = self.points.len();
        (0..n)
            .map(|k| {
                if k + 1 < n {
                    self.points[k + 1] - self.points[k]
                } else {
                    1.0 - self.points[k] + self.points[0]
                }
            })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

fn check_mass(a: f64, b: f64, scale: f64) -> Result<()> {
    if (a - b).abs() > MASS_TOL * scale.max(1.0) {
        return Err(Error::MassMismatch(a, b));
    }
    Ok(())
}

fn balanced(d: &SignedAtoms) -> Result<()> {
    let scale: f64 = d.mass.iter().map(|m| m.abs()).sum();
    check_mass(d.total(), 0.0, scale)
}

/// `W1` of a zero-total signed measure on the torus.
pub fn w1_signed(d: &SignedAtoms) -> Result<f64> {
    balanced(d)?;
    if d.points.len() < 2 {
        return Ok(0.0);
    }
    let gaps = d.gaps();
    let mut cum = Vec::with_capacity(gaps.len());
    let mut acc = 0.0;
    for m in &d.mass {
        acc += m;
        cum.push(acc);
    }
    let c = weighted_median(&cum, &gaps);
    Ok(cum.iter().zip(&gaps).map(|(x, l)| l * (x - c).abs()).sum())
}

fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let half = 0.5 * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for &i in &idx {
        acc += weights[i];
        if acc >= half {
            return values[i];
        }
    }
    values[*idx.last().expect("non-empty")]
}

/// `sup { int psi d(mu) : |psi| <= 1, Lip(psi) <= 1 }` for a signed measure,
/// with no balance requirement.
pub fn dbl_signed(d: &SignedAtoms) -> Result<f64> {
    // atoms without mass only relay the Lipschitz constraint
    let keep: Vec<usize> = (0..d.points.len()).filter(|&k| d.mass[k] != 0.0).collect();
    match keep.len() {
        0 => return Ok(0.0),
        1 => return Ok(d.mass[keep[0]].abs()),
        _ => {}
    }
    let pts: Vec<f64> = keep.iter().map(|&k| d.points[k]).collect();
    let mass: Vec<f64> = keep.iter().map(|&k| d.mass[k]).collect();
    let n = pts.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = mass.iter().map(|m| lp.add_var(*m, (-1.0, 1.0))).collect();
    for k in 0..n {
        let next = (k + 1) % n;
        if n == 2 && k == 1 {
            break;
        }
        let len = if n == 2 {
            let a = pts[1] - pts[0];
            a.min(1.0 - a)
        } else if next == 0 {
            1.0 - pts[k] + pts[0]
        } else {
            pts[next] - pts[k]
        };
        lp.add_constraint([(vars[k], 1.0), (vars[next], -1.0)], ComparisonOp::Le, len);
        lp.add_constraint([(vars[k], 1.0), (vars[next], -1.0)], ComparisonOp::Ge, -len);
    }
    let outcome = lp.solve().map_err(|e| Error::LinearProgram(format!("{e:?}")))?;
    let sol = outcome
        .into_solution()
        .map_err(|_| Error::LinearProgram("solve interrupted".into()))?;
    Ok(sol.objective().max(0.0))
}

/// `W1` between two equal-mass atomic measures on shared points.
pub fn w1_atoms(points: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64> {
    check_mass(mu.iter().sum(), nu.iter().sum(), mu.iter().map(|m| m.abs()).sum())?;
    w1_signed(&SignedAtoms::difference(points, mu, nu)?)
}

/// `d_BL` between two equal-mass atomic measures on shared points.
pub fn dbl_atoms(points: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64> {
    check_mass(mu.iter().sum(), nu.iter().sum(), mu.iter().map(|m| m.abs()).sum())?;
    dbl_signed(&SignedAtoms::difference(points, mu, nu)?)
}

/// `W1` between two grid densities of equal mass.
pub fn w1_distance(grid: &Grid1D, rho1: &[f64], rho2: &[f64]) -> Result<f64> {
    check_mass(grid.integrate(rho1), grid.integrate(rho2), grid.integrate(rho1).abs())?;
    w1_signed(&SignedAtoms::from_grid(grid, rho1, rho2)?)
}

/// `d_BL` between two grid densities of equal mass.
pub fn dbl_distance(grid: &Grid1D, rho1: &[f64], rho2: &[f64]) -> Result<f64> {
    check_mass(grid.integrate(rho1), grid.integrate(rho2), grid.integrate(rho1).abs())?;
    dbl_signed(&SignedAtoms::from_grid(grid, rho1, rho2)?)
}

/// `d_BL` between two grid functions of arbitrary total (signed measures).
pub fn dbl_grid_signed(grid: &Grid1D, f1: &[f64], f2: &[f64]) -> Result<f64> {
    dbl_signed(&SignedAtoms::from_grid(grid, f1, f2)?)
}

/// `W1` along a closed curve: the circle with arc lengths `gaps` between
/// consecutive atoms (`gaps[k]` joins atom `k` to atom `k + 1`).
pub fn w1_on_loop(mass_diff: &[f64], gaps: &[f64]) -> f64 {
    let mut cum = Vec::with_capacity(mass_diff.len());
    let mut acc = 0.0;
    for m in mass_diff {
        acc += m;
        cum.push(acc);
    }
    let c = weighted_median(&cum, gaps);
    cum.iter().zip(gaps).map(|(x, l)| l * (x - c).abs()).sum()
}
