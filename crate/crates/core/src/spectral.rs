//! FFT helpers on the periodic cell-centered grid: derivatives, circular
//! convolutions, the mean-corrected Poisson solve and the 2/3-rule filter.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Signed integer wavenumber of FFT bin `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn is_nyquist(&self, i: usize) -> bool {
        self.n % 2 == 0 && i == self.n / 2
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform (normalized), keeping the real part.
    pub fn inverse(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut c);
        let s = 1.0 / self.n as f64;
        c.into_iter().map(|z| z.re * s).collect()
    }

    /// Spectral first derivative on the unit torus.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let mut c = self.forward(f);
        self.apply_derivative(&mut c);
        self.inverse(c)
    }

    pub(crate) fn apply_derivative(&self, c: &mut [Complex64]) {
        for (i, z) in c.iter_mut().enumerate() {
            if self.is_nyquist(i) {
                *z = Complex64::new(0.0, 0.0);
            } else {
                let k = 2.0 * PI * self.wavenumber(i) as f64;
                *z = Complex64::new(-k * z.im, k * z.re);
            }
        }
    }

    /// Transform of a kernel sampled at the lags `m h`.
    pub fn kernel_transform(&self, lag_samples: &[f64]) -> Vec<Complex64> {
        self.forward(lag_samples)
    }

    /// `(K * f)_j = h sum_k K((j - k) h) f_k` for a pre-transformed kernel.
    pub fn convolve(&self, kernel_hat: &[Complex64], f: &[f64]) -> Vec<f64> {
        let h = 1.0 / self.n as f64;
        let mut c = self.forward(f);
        for (z, k) in c.iter_mut().zip(kernel_hat) {
            *z *= *k * h;
        }
        self.inverse(c)
    }

    /// Potential `phi` with `-phi'' = source - mean(source)` and zero mean.
    pub fn poisson_potential(&self, source: &[f64]) -> Vec<f64> {
        let mut c = self.forward(source);
        for (i, z) in c.iter_mut().enumerate() {
            let k = self.wavenumber(i);
            if k == 0 {
                *z = Complex64::new(0.0, 0.0);
            } else {
                let w = 2.0 * PI * k as f64;
                *z /= w * w;
            }
        }
        self.inverse(c)
    }

    /// Derivative of [`Self::poisson_potential`].
    pub fn poisson_gradient(&self, source: &[f64]) -> Vec<f64> {
        let mut c = self.forward(source);
        for (i, z) in c.iter_mut().enumerate() {
            let k = self.wavenumber(i);
            if k == 0 || self.is_nyquist(i) {
                *z = Complex64::new(0.0, 0.0);
            } else {
                let w = 2.0 * PI * k as f64;
                // (i w) / w^2 = i / w
                *z = Complex64::new(-z.im / w, z.re / w);
            }
        }
        self.inverse(c)
    }

    /// Zero-mean antiderivative of a lag-sampled odd kernel (recovers `W`
    /// from samples of `grad W`).
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        let mut c = self.forward(f);
        for (i, z) in c.iter_mut().enumerate() {
            let k = self.wavenumber(i);
            if k == 0 || self.is_nyquist(i) {
                *z = Complex64::new(0.0, 0.0);
            } else {
                let w = 2.0 * PI * k as f64;
                // z / (i w) = -i z / w
                *z = Complex64::new(z.im / w, -z.re / w);
            }
        }
        self.inverse(c)
    }

    /// 2/3-rule filter: zero every mode with `|k| > n/3`.
    pub fn dealias(&self, f: &mut [f64]) {
        let mut c = self.forward(f);
        let cut = self.n as i64 / 3;
        for (i, z) in c.iter_mut().enumerate() {
            if self.wavenumber(i).abs() > cut {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        f.copy_from_slice(&self.inverse(c));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| (j as f64 + 0.5) / n as f64).collect()
    }

    #[test]
    fn derivative_of_single_mode() {
        let n = 32;
        let sp = Spectral::new(n);
        let x = grid(n);
        let f: Vec<f64> = x.iter().map(|x| (2.0 * PI * 3.0 * x).sin()).collect();
        let d = sp.derivative(&f);
        for (xi, di) in x.iter().zip(&d) {
            let exact = 6.0 * PI * (6.0 * PI * xi).cos();
            assert!((di - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn poisson_inverts_minus_laplacian() {
        let n = 64;
        let sp = Spectral::new(n);
        let x = grid(n);
        let s: Vec<f64> = x.iter().map(|x| 2.0 + (4.0 * PI * x).cos()).collect();
        let phi = sp.poisson_potential(&s);
        for (xi, p) in x.iter().zip(&phi) {
            let exact = (4.0 * PI * xi).cos() / (16.0 * PI * PI);
            assert!((p - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn antiderivative_undoes_derivative() {
        let n = 64;
        let sp = Spectral::new(n);
        let x = grid(n);
        let w: Vec<f64> = x.iter().map(|x| (2.0 * PI * x).cos() + 0.2 * (6.0 * PI * x).sin()).collect();
        let back = sp.antiderivative(&sp.derivative(&w));
        for (a, b) in w.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dealias_keeps_low_modes() {
        let n = 32;
        let sp = Spectral::new(n);
        let x = grid(n);
        let low: Vec<f64> = x.iter().map(|x| (2.0 * PI * x).cos()).collect();
        let mut f: Vec<f64> = x
            .iter()
            .zip(&low)
            .map(|(x, l)| l + (2.0 * PI * 14.0 * x).sin())
            .collect();
        sp.dealias(&mut f);
        for (a, b) in f.iter().zip(&low) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
