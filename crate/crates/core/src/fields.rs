//! Force fields on the periodic grid: confinement `grad V`, interaction
//! `grad W * rho` (Coulomb or a bounded-Lipschitz kernel table), and the
//! communication-weight convolutions `phi * rho`, `phi * (rho u)`.
//!
//! Convolution kernels are sampled at the lag points `m h`, `m = 0..n`, since
//! differences of cell centers are multiples of `h`. A lag `m` stands for the
//! displacement `disp(m h, 0)` in `[-1/2, 1/2)`.

use std::f64::consts::PI;
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{disp, Grid1D};
use crate::spectral::Spectral;

const SYMMETRY_TOL: f64 = 1e-12;

/// Confinement potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    /// `V(x) = a (1 - cos 2 pi x)`.
    CosineWell { amplitude: f64 },
}

impl PotentialSpec {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::CosineWell { amplitude } => amplitude * (1.0 - (2.0 * PI * x).cos()),
        }
    }

    pub fn gradient(&self, x: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::CosineWell { amplitude } => 2.0 * PI * amplitude * (2.0 * PI * x).sin(),
        }
    }
}

/// `grad V` at the cell centers.
pub fn grad_confinement(spec: &PotentialSpec, grid: &Grid1D) -> Vec<f64> {
    grid.sample(|x| spec.gradient(x))
}

/// Samples of an odd interaction kernel `grad W` at the lag points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    samples: Vec<f64>,
}

impl KernelTable {
    pub fn from_samples(grid: &Grid1D, samples: Vec<f64>) -> Result<Self> {
        grid.check_len(&samples)?;
        let n = samples.len();
        let scale = samples.iter().fold(1.0f64, |m, s| m.max(s.abs()));
        let mut dev = samples[0].abs();
        for m in 1..n {
            dev = dev.max((samples[m] + samples[n - m]).abs());
        }
        if dev > SYMMETRY_TOL * scale || samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::KernelAsymmetry { deviation: dev });
        }
        Ok(Self { samples })
    }

    /// Samples `f` at `disp(m h, 0)`; the value at the half-period lag is
    /// forced to zero, as oddness and periodicity require.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = grid.n_cells();
        let h = grid.cell_width();
        let samples = (0..n)
            .map(|m| {
                if m == 0 || 2 * m == n {
                    0.0
                } else {
                    f(disp(m as f64 * h, 0.0))
                }
            })
            .collect();
        Self::from_samples(grid, samples)
    }

    /// `grad W(x) = a sin(2 pi x) / (2 pi)`, i.e. `W = -a cos(2 pi x) / (4 pi^2)`.
    pub fn sine_mode(grid: &Grid1D, amplitude: f64) -> Result<Self> {
        Self::from_fn(grid, |x| amplitude * (2.0 * PI * x).sin() / (2.0 * PI))
    }

    pub fn load_csv(path: &Path, grid: &Grid1D) -> Result<Self> {
        let samples = load_lag_table(path, grid)?;
        Self::from_samples(grid, samples)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

/// Interaction potential choice.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionSpec {
    None,
    /// Mean-corrected periodic Coulomb: `-(W * rho)'' = rho - 1`.
    Coulomb,
    BoundedLipschitz(KernelTable),
}

/// Samples of the communication weight `phi` at the lag points.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    samples: Vec<f64>,
    sup: f64,
    lipschitz: f64,
}

impl WeightSpec {
    pub fn from_samples(grid: &Grid1D, samples: Vec<f64>) -> Result<Self> {
        grid.check_len(&samples)?;
        let n = samples.len();
        if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidWeight("phi must be finite and non-negative".into()));
        }
        let scale = samples.iter().fold(1.0f64, |m, s| m.max(s.abs()));
        for m in 1..n {
            if (samples[m] - samples[n - m]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidWeight("phi must be even".into()));
            }
        }
        let sup = samples.iter().fold(0.0f64, |m, s| m.max(*s));
        let h = grid.cell_width();
        let lipschitz = (0..n)
            .map(|m| (samples[(m + 1) % n] - samples[m]).abs() / h)
            .fold(0.0, f64::max);
        Ok(Self {
            samples,
            sup,
            lipschitz,
        })
    }

    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = grid.cell_width();
        let samples = (0..grid.n_cells())
            .map(|m| f(disp(m as f64 * h, 0.0)))
            .collect();
        Self::from_samples(grid, samples)
    }

    pub fn zero(grid: &Grid1D) -> Self {
        Self::from_samples(grid, vec![0.0; grid.n_cells()]).expect("zero weight is valid")
    }

    pub fn constant(grid: &Grid1D, value: f64) -> Result<Self> {
        Self::from_samples(grid, vec![value; grid.n_cells()])
    }

    /// `phi(x) = mean + amplitude cos(2 pi x)`.
    pub fn cosine(grid: &Grid1D, mean: f64, amplitude: f64) -> Result<Self> {
        Self::from_fn(grid, |x| mean + amplitude * (2.0 * PI * x).cos())
    }

    pub fn load_csv(path: &Path, grid: &Grid1D) -> Result<Self> {
        let samples = load_lag_table(path, grid)?;
        Self::from_samples(grid, samples)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Reads a two-column `x,value` table whose abscissae are the lag points
/// `m h` (taken modulo 1); every lag must appear exactly once.
fn load_lag_table(path: &Path, grid: &Grid1D) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let n = grid.n_cells();
    let mut out: Vec<Option<f64>> = vec![None; n];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(xs), Some(vs), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse(format!(
                "{}:{}: expected two columns",
                path.display(),
                lineno + 1
            )));
        };
        let (Ok(x), Ok(v)) = (xs.parse::<f64>(), vs.parse::<f64>()) else {
            if lineno == 0 {
                continue; // header
            }
            return Err(Error::Parse(format!(
                "{}:{}: non-numeric entry",
                path.display(),
                lineno + 1
            )));
        };
        let s = x.rem_euclid(1.0) * n as f64;
        let m = s.round();
        if (s - m).abs() > 1e-6 {
            return Err(Error::Parse(format!(
                "{}:{}: x = {x} is not a lag point of the {n}-cell grid",
                path.display(),
                lineno + 1
            )));
        }
        let m = (m as usize) % n;
        if out[m].replace(v).is_some() {
            return Err(Error::Parse(format!(
                "{}: lag {m} given twice",
                path.display()
            )));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(m, v)| v.ok_or_else(|| Error::Parse(format!("{}: lag {m} missing", path.display()))))
        .collect()
}

/// Mean-corrected periodic Coulomb field: returns `phi'` with
/// `-phi'' = rho - mean(rho)`.
pub fn coulomb_force(spectral: &Spectral, rho: &[f64]) -> Result<Vec<f64>> {
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    if (mean - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitMass { mean });
    }
    Ok(spectral.poisson_gradient(rho))
}

/// `(grad W * rho)(x_j) = sum_k grad W(x_j - x_k) rho_k h`.
pub fn kernel_force(spectral: &Spectral, rho: &[f64], kernel: &KernelTable) -> Vec<f64> {
    spectral.convolve(&spectral.kernel_transform(kernel.samples()), rho)
}

/// `(phi * rho, phi * (rho u))` through the same spectral path.
pub fn phi_convolutions(
    spectral: &Spectral,
    rho: &[f64],
    rho_u: &[f64],
    weight: &WeightSpec,
) -> (Vec<f64>, Vec<f64>) {
    let hat = spectral.kernel_transform(weight.samples());
    (spectral.convolve(&hat, rho), spectral.convolve(&hat, rho_u))
}

/// All force fields for one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    pub grad_v: Vec<f64>,
    pub grad_w_conv_rho: Vec<f64>,
    pub phi_conv_rho: Vec<f64>,
    pub phi_conv_rho_u: Vec<f64>,
}

/// Potentials and kernels of a run with their transforms precomputed.
#[derive(Debug, Clone)]
pub struct FieldModel {
    grid: Grid1D,
    spectral: Spectral,
    potential: PotentialSpec,
    interaction: InteractionSpec,
    weight: WeightSpec,
    grad_v: Vec<f64>,
    v_values: Vec<f64>,
    kernel_hat: Option<Vec<Complex64>>,
    w_hat: Option<Vec<Complex64>>,
    weight_hat: Vec<Complex64>,
}

impl FieldModel {
    pub fn new(
        grid: Grid1D,
        potential: PotentialSpec,
        interaction: InteractionSpec,
        weight: WeightSpec,
    ) -> Result<Self> {
        grid.check_len(weight.samples())?;
        let spectral = Spectral::new(grid.n_cells());
        let (kernel_hat, w_hat) = match &interaction {
            InteractionSpec::BoundedLipschitz(k) => {
                grid.check_len(k.samples())?;
                let w = spectral.antiderivative(k.samples());
                (
                    Some(spectral.kernel_transform(k.samples())),
                    Some(spectral.kernel_transform(&w)),
                )
            }
            _ => (None, None),
        };
        let weight_hat = spectral.kernel_transform(weight.samples());
        Ok(Self {
            grad_v: grad_confinement(&potential, &grid),
            v_values: grid.sample(|x| potential.value(x)),
            grid,
            spectral,
            potential,
            interaction,
            weight,
            kernel_hat,
            w_hat,
            weight_hat,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn interaction(&self) -> &InteractionSpec {
        &self.interaction
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn grad_potential(&self) -> &[f64] {
        &self.grad_v
    }

    pub fn potential_values(&self) -> &[f64] {
        &self.v_values
    }

    /// `grad W * rho`.
    pub fn interaction_force(&self, rho: &[f64]) -> Result<Vec<f64>> {
        match (&self.interaction, &self.kernel_hat) {
            (InteractionSpec::None, _) => Ok(vec![0.0; rho.len()]),
            (InteractionSpec::Coulomb, _) => coulomb_force(&self.spectral, rho),
            (InteractionSpec::BoundedLipschitz(_), Some(hat)) => Ok(self.spectral.convolve(hat, rho)),
            (InteractionSpec::BoundedLipschitz(_), None) => unreachable!("kernel transform is built in new"),
        }
    }

    /// `W * rho` with the zero-mean normalization of `W`.
    pub fn interaction_potential(&self, rho: &[f64]) -> Vec<f64> {
        match (&self.interaction, &self.w_hat) {
            (InteractionSpec::None, _) => vec![0.0; rho.len()],
            (InteractionSpec::Coulomb, _) => self.spectral.poisson_potential(rho),
            (InteractionSpec::BoundedLipschitz(_), Some(hat)) => self.spectral.convolve(hat, rho),
            (InteractionSpec::BoundedLipschitz(_), None) => unreachable!("kernel transform is built in new"),
        }
    }

    pub fn phi_conv(&self, f: &[f64]) -> Vec<f64> {
        self.spectral.convolve(&self.weight_hat, f)
    }

    pub fn compute(&self, rho: &[f64], rho_u: &[f64]) -> Result<FieldSet> {
        self.grid.check_len(rho)?;
        self.grid.check_len(rho_u)?;
        let set = FieldSet {
            grad_v: self.grad_v.clone(),
            grad_w_conv_rho: self.interaction_force(rho)?,
            phi_conv_rho: self.phi_conv(rho),
            phi_conv_rho_u: self.phi_conv(rho_u),
        };
        let finite = [&set.grad_w_conv_rho, &set.phi_conv_rho, &set.phi_conv_rho_u]
            .iter()
            .all(|f| f.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::NonFiniteState { time: f64::NAN });
        }
        Ok(set)
    }

    /// `(lambda / 2) int (W * rho) rho` without the `lambda`.
    pub fn interaction_energy(&self, rho: &[f64]) -> f64 {
        let w = self.interaction_potential(rho);
        0.5 * self.grid.integrate(&mul(&w, rho))
    }

    /// `int V rho`.
    pub fn potential_energy(&self, rho: &[f64]) -> f64 {
        self.grid.integrate(&mul(&self.v_values, rho))
    }

    /// `int int phi(x - y) rho(x) rho(y)`.
    pub fn weight_mass(&self, rho: &[f64]) -> f64 {
        self.grid.integrate(&mul(&self.phi_conv(rho), rho))
    }
}

pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// O(G^2) periodic convolution straight from the definition.
    fn direct(grid: &Grid1D, kernel: impl Fn(f64) -> f64, rho: &[f64]) -> Vec<f64> {
        let h = grid.cell_width();
        (0..grid.n_cells())
            .map(|j| {
                (0..grid.n_cells())
                    .map(|k| kernel(disp(grid.center(j), grid.center(k))) * rho[k] * h)
                    .sum()
            })
            .collect()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn coulomb_uniform_density_gives_zero_field() {
        let sp = Spectral::new(32);
        let f = coulomb_force(&sp, &vec![1.0; 32]).unwrap();
        assert!(f.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn coulomb_single_modes() {
        let g = Grid1D::new(128).unwrap();
        let sp = Spectral::new(128);
        let rho = g.sample(|x| 1.0 + (2.0 * PI * x).cos());
        let f = coulomb_force(&sp, &rho).unwrap();
        for (j, v) in f.iter().enumerate() {
            let x = g.center(j);
            assert!((v + (2.0 * PI * x).sin() / (2.0 * PI)).abs() < 1e-14);
        }
        // value at x = 1/4 via an independent route: centered differences of
        // the potential obtained by quadrature of the Green's function
        let green = |d: f64| -d.abs() / 2.0 + d * d / 2.0;
        let phi = direct(&g, green, &rho);
        let fine = 1.0 / 128.0;
        // x = 1/4 sits between centers 31 and 32
        let fd = (phi[32] - phi[31]) / fine;
        assert!((fd + 1.0 / (2.0 * PI)).abs() < 1e-3, "fd = {fd}");
        let rho2 = g.sample(|x| 1.0 + 0.3 * (4.0 * PI * x).cos());
        let f2 = coulomb_force(&sp, &rho2).unwrap();
        for (j, v) in f2.iter().enumerate() {
            let x = g.center(j);
            assert!((v + 0.3 * (4.0 * PI * x).sin() / (4.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn coulomb_rejects_non_unit_mass() {
        let sp = Spectral::new(16);
        assert!(matches!(
            coulomb_force(&sp, &vec![1.1; 16]),
            Err(Error::NonUnitMass { .. })
        ));
    }

    #[test]
    fn coulomb_matches_sawtooth_kernel_table() {
        // periodic Green's function gradient: -sign(x)/2 + x
        let g = Grid1D::new(256).unwrap();
        let sp = Spectral::new(256);
        let table = KernelTable::from_fn(&g, |x| -x.signum() / 2.0 + x).unwrap();
        let rho = g.sample(|x| 1.0 + 0.5 * (2.0 * PI * x).sin() + 0.2 * (6.0 * PI * x).cos());
        let a = coulomb_force(&sp, &rho).unwrap();
        let b = kernel_force(&sp, &rho, &table);
        // discontinuous kernel: first-order quadrature only
        assert!(max_diff(&a, &b) < 4.0 / 256.0);
    }

    #[test]
    fn kernel_force_examples() {
        let g = Grid1D::new(64).unwrap();
        let sp = Spectral::new(64);
        let k = KernelTable::sine_mode(&g, 1.0).unwrap();
        let flat = kernel_force(&sp, &vec![1.0; 64], &k);
        assert!(flat.iter().all(|x| x.abs() < 1e-15));
        let rho = g.sample(|x| 1.0 + (2.0 * PI * x).cos());
        let f = kernel_force(&sp, &rho, &k);
        let exact = g.sample(|x| (2.0 * PI * x).sin() / (4.0 * PI));
        assert!(max_diff(&f, &exact) < 1e-14);
        let brute = direct(&g, |d| (2.0 * PI * d).sin() / (2.0 * PI), &rho);
        assert!(max_diff(&f, &brute) < 1e-13);
    }

    #[test]
    fn asymmetric_kernel_rejected() {
        let g = Grid1D::new(8).unwrap();
        let mut s = KernelTable::sine_mode(&g, 1.0).unwrap().samples().to_vec();
        s[1] += 1e-6;
        assert!(matches!(
            KernelTable::from_samples(&g, s),
            Err(Error::KernelAsymmetry { .. })
        ));
    }

    #[test]
    fn phi_convolution_examples() {
        let g = Grid1D::new(32).unwrap();
        let sp = Spectral::new(32);
        let one = WeightSpec::constant(&g, 1.0).unwrap();
        let rho = g.sample(|x| 1.0 + 0.7 * (2.0 * PI * x).sin());
        let rho_u = g.sample(|x| 0.4 + (6.0 * PI * x).cos());
        let (a, b) = phi_convolutions(&sp, &rho, &rho_u, &one);
        assert!(a.iter().all(|x| (x - 1.0).abs() < 1e-14));
        assert!(b.iter().all(|x| (x - 0.4).abs() < 1e-14));
        let phi = WeightSpec::cosine(&g, 1.0, 0.5).unwrap();
        let rho = g.sample(|x| 1.0 + (2.0 * PI * x).cos());
        let (c, _) = phi_convolutions(&sp, &rho, &rho, &phi);
        let exact = g.sample(|x| 1.0 + 0.25 * (2.0 * PI * x).cos());
        assert!(max_diff(&c, &exact) < 1e-14);
        let brute = direct(&g, |d| 1.0 + 0.5 * (2.0 * PI * d).cos(), &rho);
        assert!(max_diff(&c, &brute) < 1e-13);
        assert_eq!(phi.sup_norm(), 1.5);
        assert!(phi.lipschitz() <= PI + 1e-12);
    }

    #[test]
    fn confinement_examples() {
        let g = Grid1D::new(8).unwrap();
        assert!(grad_confinement(&PotentialSpec::Zero, &g).iter().all(|x| *x == 0.0));
        let well = PotentialSpec::CosineWell { amplitude: 1.0 };
        assert!((well.gradient(0.25) - 2.0 * PI).abs() < 1e-14);
        let half = PotentialSpec::CosineWell { amplitude: 0.5 };
        assert_eq!(half.gradient(0.0), 0.0);
    }

    #[test]
    fn csv_tables_round_trip_and_validate() {
        let g = Grid1D::new(8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.csv");
        let k = KernelTable::sine_mode(&g, 1.0).unwrap();
        let mut text = String::from("x,value\n");
        for (m, v) in k.samples().iter().enumerate() {
            text.push_str(&format!("{},{}\n", m as f64 / 8.0, v));
        }
        std::fs::write(&path, &text).unwrap();
        assert_eq!(KernelTable::load_csv(&path, &g).unwrap(), k);
        std::fs::write(&path, "0.0,0\n0.1,1\n").unwrap();
        assert!(matches!(KernelTable::load_csv(&path, &g), Err(Error::Parse(_))));
    }

    fn random_odd(g: &Grid1D, coeffs: &[f64]) -> KernelTable {
        KernelTable::from_fn(g, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (2.0 * PI * (k + 1) as f64 * x).sin())
                .sum()
        })
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn spectral_equals_direct(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 4),
            dens in proptest::collection::vec(0.1f64..2.0, 64),
        ) {
            let g = Grid1D::new(64).unwrap();
            let sp = Spectral::new(64);
            let k = random_odd(&g, &coeffs);
            let f = kernel_force(&sp, &dens, &k);
            let h = g.cell_width();
            let brute: Vec<f64> = (0..64).map(|j| {
                (0..64).map(|i| k.samples()[(j + 64 - i) % 64] * dens[i] * h).sum()
            }).collect();
            prop_assert!(max_diff(&f, &brute) < 1e-10);
            let w = WeightSpec::from_fn(&g, |x| 1.0 + 0.5 * (2.0 * PI * x).cos() * coeffs[0]).unwrap();
            let (a, _) = phi_convolutions(&sp, &dens, &dens, &w);
            let brute_w: Vec<f64> = (0..64).map(|j| {
                (0..64).map(|i| w.samples()[(j + 64 - i) % 64] * dens[i] * h).sum()
            }).collect();
            prop_assert!(max_diff(&a, &brute_w) < 1e-10);
            prop_assert!(a.iter().all(|x| *x >= -1e-12));
        }

        #[test]
        fn action_reaction_and_linearity(
            c in proptest::collection::vec(-1.0f64..1.0, 4),
            p in proptest::collection::vec(-0.4f64..0.4, 3),
            q in proptest::collection::vec(-0.4f64..0.4, 3),
            a in -2.0f64..2.0, b in -2.0f64..2.0,
        ) {
            let g = Grid1D::new(64).unwrap();
            let sp = Spectral::new(64);
            let mk = |v: &[f64]| g.sample(|x| 1.0 + v[0] * (2.0 * PI * x).cos() + v[1] * (4.0 * PI * x).sin() + v[2] * (10.0 * PI * x).cos());
            let (r1, r2) = (mk(&p), mk(&q));
            let k = random_odd(&g, &c);
            let pair = |f1: &[f64], f2: &[f64]| g.integrate(&mul(f1, f2));
            let k1 = kernel_force(&sp, &r1, &k);
            let k2 = kernel_force(&sp, &r2, &k);
            prop_assert!((pair(&k1, &r2) + pair(&k2, &r1)).abs() < 1e-10);
            let c1 = coulomb_force(&sp, &r1).unwrap();
            let c2 = coulomb_force(&sp, &r2).unwrap();
            prop_assert!((pair(&c1, &r2) + pair(&c2, &r1)).abs() < 1e-10);
            prop_assert!(g.integrate(&c1).abs() < 1e-12);
            let comb: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| a * x + b * y).collect();
            let kc = kernel_force(&sp, &comb, &k);
            let lin: Vec<f64> = k1.iter().zip(&k2).map(|(x, y)| a * x + b * y).collect();
            prop_assert!(max_diff(&kc, &lin) < 1e-12);
            // Coulomb is affine: check on a mean-one combination
            let t = a.abs() / (a.abs() + b.abs() + 1e-9);
            let mix: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| t * x + (1.0 - t) * y).collect();
            let cm = coulomb_force(&sp, &mix).unwrap();
            let lin_c: Vec<f64> = c1.iter().zip(&c2).map(|(x, y)| t * x + (1.0 - t) * y).collect();
            prop_assert!(max_diff(&cm, &lin_c) < 1e-12);
        }
    }
}
