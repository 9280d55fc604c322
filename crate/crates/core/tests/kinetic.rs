use std::f64::consts::PI;

use hydrolimit::fields::{FieldModel, InteractionSpec, PotentialSpec, WeightSpec};
use hydrolimit::kinetic::{assemble_accelerations, estimate_moments, init_well_prepared, step_euler_maruyama};
use hydrolimit::model::{disp, wrap_torus, Grid1D, ModelParams, ParticleEnsemble};

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n)
}

fn coeffs(gamma: f64, alpha: f64, beta: f64, sigma: f64) -> ModelParams {
    ModelParams {
        gamma,
        lambda: 0.0,
        alpha,
        beta,
        sigma,
        epsilon: 1.0,
    }
}

fn free_model(g: Grid1D, weight: WeightSpec) -> FieldModel {
    FieldModel::new(g, PotentialSpec::Zero, InteractionSpec::None, weight).unwrap()
}

/// Runs `steps` Euler-Maruyama steps with the full drift.
fn advance(ens: &mut ParticleEnsemble, model: &FieldModel, p: &ModelParams, dt: f64, steps: u64, eps_reg: f64) {
    let g = *model.grid();
    for s in 0..steps {
        let m = estimate_moments(ens, &g, eps_reg);
        let f = model.compute(&m.rho, &m.rho_u).unwrap();
        let a = assemble_accelerations(ens, &m, &f, p, &g);
        step_euler_maruyama(ens, &a, dt, p.sigma, s);
    }
}

// Simpson rule on the unit Gaussian density
fn gauss_mass(a: f64, b: f64) -> f64 {
    let k = 2000;
    let h = (b - a) / k as f64;
    let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let inner: f64 = (1..k).map(|i| pdf(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (pdf(a) + pdf(b) + inner)
}

#[test]
fn uniform_data_draws_standard_gaussian_velocities() {
    let g = Grid1D::new(64).unwrap();
    let n = 1_000_000;
    let ens = init_well_prepared(&g, &vec![1.0; 64], &vec![0.0; 64], n, 11).unwrap();
    let (m, v) = mean_var(&ens.velocities);
    assert!(m.abs() < 3e-3, "mean {m}");
    assert!((v - 1.0).abs() < 5e-3, "variance {v}");

    let c = 0.7;
    let ens = init_well_prepared(&g, &vec![1.0; 64], &vec![c; 64], n, 12).unwrap();
    let (m, v) = mean_var(&ens.velocities);
    assert!((m - c).abs() < 3e-3, "mean {m}");
    assert!((v - 1.0).abs() < 5e-3, "variance {v}");
}

#[test]
fn positions_follow_the_initial_density() {
    let cells = 32;
    let g = Grid1D::new(cells).unwrap();
    let rho0 = g.sample(|x| 1.0 + 0.5 * (2.0 * PI * x).cos());
    let n = 1_000_000;
    let ens = init_well_prepared(&g, &rho0, &vec![0.0; cells], n, 5).unwrap();
    let h = g.cell_width();
    let mut counts = vec![0usize; cells];
    for &x in &ens.positions {
        counts[((x / h) as usize).min(cells - 1)] += 1;
    }
    // cell j holds mass proportional to rho0 at node j
    let total: f64 = rho0.iter().sum();
    for (j, &c) in counts.iter().enumerate() {
        let p = rho0[j] / total;
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((c as f64 - mean).abs() < 3.0 * sd, "cell {j}: {c} vs {mean:.0} +- {sd:.0}");
    }
}

#[test]
fn brownian_step_adds_two_sigma_dt_of_variance() {
    let g = Grid1D::new(32).unwrap();
    let n = 1_000_000;
    let mut ens = init_well_prepared(&g, &vec![1.0; 32], &vec![0.0; 32], n, 21).unwrap();
    let (_, before) = mean_var(&ens.velocities);
    let (sigma, dt) = (1.0, 0.01);
    step_euler_maruyama(&mut ens, &vec![0.0; n], dt, sigma, 0);
    let (_, after) = mean_var(&ens.velocities);
    // Var(v + s xi) - Var(v) = s^2 + 2 s cov(v, xi) + fluctuations of s^2 xi^2
    let s2 = 2.0 * sigma * dt;
    let sd = (4.0 * s2 * before / n as f64 + 2.0 * s2 * s2 / n as f64).sqrt();
    let gain = after - before;
    assert!((gain - s2).abs() < 3.0 * sd, "gain {gain} vs {s2} +- {sd}");
}

#[test]
fn free_transport_is_linear_in_time() {
    let g = Grid1D::new(16).unwrap();
    let xs = vec![0.0, 0.13, 0.5, 0.91, 0.999];
    let vs = vec![1.0, -2.5, 0.25, 3.0, -0.125];
    let mut ens = ParticleEnsemble::new(xs.clone(), vs.clone(), 0).unwrap();
    let model = free_model(g, WeightSpec::zero(&g));
    let dt = 1e-3;
    let steps = 1000;
    advance(&mut ens, &model, &coeffs(0.0, 0.0, 0.0, 0.0), dt, steps, 1e-8);
    assert_eq!(ens.velocities, vs);
    for i in 0..xs.len() {
        let exact = wrap_torus(xs[i] + vs[i] * dt * steps as f64);
        assert!(disp(ens.positions[i], exact).abs() < 1e-12, "{i}: {} vs {exact}", ens.positions[i]);
    }
}

#[test]
fn damping_alone_decays_kinetic_energy_exponentially() {
    let g = Grid1D::new(32).unwrap();
    let mut ens = init_well_prepared(&g, &vec![1.0; 32], &vec![0.3; 32], 20_000, 4).unwrap();
    let e0 = ens.second_moment();
    let model = free_model(g, WeightSpec::zero(&g));
    let dt = 1e-3;
    advance(&mut ens, &model, &coeffs(1.0, 0.0, 0.0, 0.0), dt, 1000, 1e-8);
    let ratio = ens.second_moment() / e0;
    // explicit Euler gives (1 - dt)^(2n) = e^{-2} (1 - dt + O(dt^2))
    assert!((ratio - (-2.0f64).exp()).abs() < 2.0 * dt * (-2.0f64).exp(), "ratio {ratio}");
}

#[test]
fn local_alignment_with_matching_noise_keeps_the_maxwellian() {
    let g = Grid1D::new(32).unwrap();
    let n = 100_000;
    let mut ens = init_well_prepared(&g, &vec![1.0; 32], &vec![0.0; 32], n, 8).unwrap();
    let model = free_model(g, WeightSpec::zero(&g));
    // beta = sigma = 1/eps with eps = 0.1; the equilibrium temperature is 1
    let p = coeffs(0.0, 0.0, 10.0, 10.0);
    advance(&mut ens, &model, &p, 5e-4, 1000, 1e-8);
    let mut counts = vec![0usize; 12];
    for &v in &ens.velocities {
        let k = ((v + 3.0) / 0.5).floor();
        if (0.0..12.0).contains(&k) {
            counts[k as usize] += 1;
        }
    }
    for (k, &c) in counts.iter().enumerate() {
        let a = -3.0 + 0.5 * k as f64;
        let p = gauss_mass(a, a + 0.5);
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((c as f64 - mean).abs() < 3.0 * sd, "bin {k}: {c} vs {mean:.0} +- {sd:.0}");
    }
}

#[test]
fn alignment_conserves_total_momentum() {
    let g = Grid1D::new(32).unwrap();
    let rho0 = g.sample(|x| 1.0 + 0.3 * (2.0 * PI * x).sin());
    let u0 = g.sample(|x| 0.5 + 0.3 * (2.0 * PI * x).cos());
    let mut ens = init_well_prepared(&g, &rho0, &u0, 100_000, 6).unwrap();
    let p0 = ens.mean_velocity();
    let model = free_model(g, WeightSpec::cosine(&g, 1.0, 0.5).unwrap());
    // with no regularization the local term is exactly adjoint to deposition
    advance(&mut ens, &model, &coeffs(0.0, 1.0, 10.0, 0.0), 2e-3, 1000, 0.0);
    let drift = (ens.mean_velocity() - p0).abs();
    assert!(drift < 1e-10, "momentum drift {drift}");
}
