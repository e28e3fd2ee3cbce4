//! Fourier tools for samples `u_j = u(j / n)` of a 1-periodic function.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

fn forward(u: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn inverse_real(mut buf: Vec<Complex64>) -> Vec<f64> {
    let n = buf.len();
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Signed wavenumber of FFT bin `j`; the Nyquist bin of an even grid maps to 0.
fn wavenumber(j: usize, n: usize) -> f64 {
    if 2 * j < n {
        j as f64
    } else if 2 * j == n {
        0.0
    } else {
        j as f64 - n as f64
    }
}

pub fn mean(u: &[f64]) -> f64 {
    u.iter().sum::<f64>() / u.len() as f64
}

/// Trigonometric-interpolant derivative `u'(x_j)`.
pub fn derivative(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut c = forward(u);
    for (j, cj) in c.iter_mut().enumerate() {
        *cj *= Complex64::new(0.0, 2.0 * PI * wavenumber(j, n));
    }
    inverse_real(c)
}

/// Periodic part of the antiderivative: `int_0^{x_j} u = mean(u) x_j + P_j` with `P_0 = 0`.
/// Returns `(P, mean(u))`.
pub fn antiderivative(u: &[f64]) -> (Vec<f64>, f64) {
    let n = u.len();
    let mut c = forward(u);
    let m = c[0].re / n as f64;
    c[0] = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        let k = wavenumber(j, n);
        *cj = if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            *cj / Complex64::new(0.0, 2.0 * PI * k)
        };
    }
    let mut p = inverse_real(c);
    let p0 = p[0];
    p.iter_mut().for_each(|x| *x -= p0);
    (p, m)
}

/// `int_0^{x_j} u` including the linear part.
pub fn cumulative_integral(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let (p, m) = antiderivative(u);
    p.iter()
        .enumerate()
        .map(|(j, pj)| pj + m * j as f64 / n as f64)
        .collect()
}

/// Band-limited interpolation onto a grid `factor` times finer.
pub fn upsample(u: &[f64], factor: usize) -> Vec<f64> {
    let n = u.len();
    if factor <= 1 {
        return u.to_vec();
    }
    let m = n * factor;
    let c = forward(u);
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        let scale = factor as f64;
        if 2 * j < n {
            out[j] += c[j] * scale;
        } else if 2 * j == n {
            // Split the Nyquist coefficient symmetrically.
            out[j] += c[j] * (0.5 * scale);
            out[m - j] += c[j] * (0.5 * scale);
        } else {
            out[m - (n - j)] += c[j] * scale;
        }
    }
    inverse_real(out)
}

/// Dense Fourier differentiation matrix on `n` points of `[0, 1)` (`n` even).
pub fn diff_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            0.0
        } else {
            let m = j as i64 - k as i64;
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * PI / (PI * m as f64 / n as f64).tan()
        }
    })
}

/// Four-point Lagrange interpolation of periodic samples at an arbitrary point.
pub fn interpolate_at(u: &[f64], x: f64) -> f64 {
    let n = u.len();
    let s = x.rem_euclid(1.0) * n as f64;
    let i = s.floor() as i64;
    let t = s - i as f64;
    let at = |k: i64| u[k.rem_euclid(n as i64) as usize];
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3
}

/// Resamples periodic data onto `m` uniform points.
pub fn resample(u: &[f64], m: usize) -> Vec<f64> {
    let n = u.len();
    if m == n {
        return u.to_vec();
    }
    if m > n && m % n == 0 {
        return upsample(u, m / n);
    }
    (0..m).map(|j| interpolate_at(u, j as f64 / m as f64)).collect()
}
