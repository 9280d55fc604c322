//! Torus transport distances and relative entropy against their
//! brute-force references.

use hydrolimit::metrics::rel_entropy_pointwise;
use hydrolimit::metrics::transport::{dbl_atoms, dbl_distance, w1_atoms, w1_distance};
use hydrolimit::model::Grid1D;
use hydrolimit::oracle;

fn main() -> hydrolimit::Result<()> {
    let points = [0.05, 0.3, 0.62, 0.9];
    let mu = [3u32, 0, 1, 2];
    let nu = [0u32, 2, 2, 2];
    let norm = |m: &[u32]| -> Vec<f64> { m.iter().map(|k| *k as f64 / 6.0).collect() };
    println!(
        "atoms: W1 {:.6} d_BL {:.6} assignment {:.6}",
        w1_atoms(&points, &norm(&mu), &norm(&nu))?,
        dbl_atoms(&points, &norm(&mu), &norm(&nu))?,
        oracle::w1_integer_masses(&points, &mu, &nu)
    );

    // a shifted bump: W1 equals the shift for small shifts
    let grid = Grid1D::new(256)?;
    let bump = |c: f64| {
        let raw = grid.sample(|x| (-(hydrolimit::model::disp(x, c) / 0.05).powi(2)).exp());
        let mass = grid.integrate(&raw);
        raw.into_iter().map(|r| r / mass).collect::<Vec<_>>()
    };
    let (a, b) = (bump(0.3), bump(0.34));
    println!("grid bump shifted by 0.04: W1 {:.6} d_BL {:.6}", w1_distance(&grid, &a, &b)?, dbl_distance(&grid, &a, &b)?);

    for (x, y) in [(2.0, 1.0), (0.5, 1.5), (0.0, 0.7)] {
        println!(
            "H({x}|{y}) = {:.12} (quadrature {:.12})",
            rel_entropy_pointwise(x, y)?,
            oracle::entropy_quadrature(x, y)
        );
    }
    Ok(())
}
