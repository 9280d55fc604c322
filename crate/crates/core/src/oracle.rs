//! Brute-force reference computations used to cross-check the fast paths.
//! They are slow and only meant for small inputs.

use crate::model::disp;

/// Exact `W1` between two uniform measures with `n` atoms each
/// (`n <= 20`), by dynamic programming over all assignments.
pub fn w1_assignment(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    assert_eq!(n, ys.len(), "assignment needs equal atom counts");
    assert!(n <= 20, "assignment oracle is exponential in the atom count");
    if n == 0 {
        return 0.0;
    }
    let full = (1usize << n) - 1;
    let mut best = vec![f64::INFINITY; full + 1];
    best[0] = 0.0;
    for mask in 0..full {
        let cost = best[mask];
        if !cost.is_finite() {
            continue;
        }
        // the next source atom is the number of targets already used
        let i = mask.count_ones() as usize;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let c = cost + disp(xs[i], ys[j]).abs();
                if c < best[next] {
                    best[next] = c;
                }
            }
        }
    }
    best[full] / n as f64
}

/// `W1` between integer-mass atomic measures of equal total, by splitting
/// every atom into unit atoms and solving the assignment problem.
pub fn w1_integer_masses(points: &[f64], mu: &[u32], nu: &[u32]) -> f64 {
    let expand = |m: &[u32]| -> Vec<f64> {
        points
            .iter()
            .zip(m)
            .flat_map(|(p, k)| std::iter::repeat_n(*p, *k as usize))
            .collect()
    };
    w1_assignment(&expand(mu), &expand(nu))
}

/// `H(a|b)` as `int_b^a (a - z) / z dz` by composite Simpson quadrature.
pub fn entropy_quadrature(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return b;
    }
    let n = 20_000;
    let step = (a - b) / n as f64;
    let f = |z: f64| (a - z) / z;
    let mut s = f(b) + f(a);
    for k in 1..n {
        let z = b + k as f64 * step;
        s += if k % 2 == 1 { 4.0 * f(z) } else { 2.0 * f(z) };
    }
    s * step / 3.0
}

/// Direct `O(n^2)` periodic convolution `h sum_k K(x_j - x_k) f_k` on cell
/// centers.
pub fn direct_convolution(kernel: impl Fn(f64) -> f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let h = 1.0 / n as f64;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| kernel(disp((j as f64 + 0.5) * h, (k as f64 + 0.5) * h)) * f[k])
                .sum::<f64>()
                * h
        })
        .collect()
}
