//! Nonlocal fields on the grid: Coulomb and bounded kernels, the
//! communication-weight convolutions, checked against direct sums.

use std::f64::consts::PI;

use hydrolimit::fields::{FieldModel, InteractionSpec, KernelTable, PotentialSpec, WeightSpec};
use hydrolimit::model::{disp, Grid1D};
use hydrolimit::oracle::direct_convolution;

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> hydrolimit::Result<()> {
    let grid = Grid1D::new(128)?;
    let rho = grid.sample(|x| 1.0 + 0.3 * (2.0 * PI * x).cos());
    let weight = WeightSpec::cosine(&grid, 1.0, 0.5)?;

    let coulomb = FieldModel::new(grid, PotentialSpec::Zero, InteractionSpec::Coulomb, weight.clone())?;
    let force = coulomb.interaction_force(&rho)?;
    // -(W * rho)'' = rho - 1 gives W' * rho = -0.3 sin(2 pi x) / (2 pi)
    let exact = grid.sample(|x| -0.3 * (2.0 * PI * x).sin() / (2.0 * PI));
    println!("Coulomb force vs closed form: {:.2e}", max_gap(&force, &exact));

    let kernel = KernelTable::sine_mode(&grid, 1.0)?;
    let sine = FieldModel::new(grid, PotentialSpec::Zero, InteractionSpec::BoundedLipschitz(kernel), weight)?;
    let direct = direct_convolution(|x| (2.0 * PI * x).sin() / (2.0 * PI), &rho);
    println!("sine kernel force vs direct sum: {:.2e}", max_gap(&sine.interaction_force(&rho)?, &direct));

    let phi = |x: f64| 1.0 + 0.5 * (2.0 * PI * x).cos();
    let direct = direct_convolution(phi, &rho);
    println!("phi * rho vs direct sum: {:.2e}", max_gap(&sine.phi_conv(&rho), &direct));
    println!(
        "interaction energy {:.6}, weight mass {:.6}, phi(0.5) = {}",
        sine.interaction_energy(&rho),
        sine.weight_mass(&rho),
        phi(disp(0.5, 0.0))
    );
    Ok(())
}
