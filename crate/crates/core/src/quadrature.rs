//! Adaptive Gauss-Kronrod quadrature and fourth-order cumulative rules on uniform grids.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod rule with the embedded 7-point Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive bisection until the summed error estimate is below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..4000 {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(parts.iter().map(|p| p.2).sum());
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature(format!("interval [{lo}, {hi}] cannot be split further")));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    let total_err: f64 = parts.iter().map(|p| p.3).sum();
    if total_err <= 100.0 * tol {
        return Ok(parts.iter().map(|p| p.2).sum());
    }
    Err(Error::Quadrature(format!("error estimate {total_err:e} above tolerance {tol:e}")))
}

/// Integral over `[a, b]` split at the given interior break points.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let m = (pts.len() - 1) as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate(&f, w[0], w[1], tol / m)?;
    }
    Ok(total)
}

/// Running integral `I_j = int_0^{jh} f` from samples `f_ext[k] = f((k - 1) h)` for
/// `k = 0 ..= n + 2`, i.e. with one ghost value on each side. Returns `n + 1` values.
pub fn cumulative_with_ghosts(f_ext: &[f64], h: f64) -> Vec<f64> {
    let n = f_ext.len() - 3;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 0..n {
        let k = j + 1;
        acc += h / 24.0 * (-f_ext[k - 1] + 13.0 * f_ext[k] + 13.0 * f_ext[k + 1] - f_ext[k + 2]);
        out.push(acc);
    }
    out
}

/// Running integral from samples on `[0, (m - 1) h]` with one-sided end panels.
/// Needs at least four samples; falls back to the trapezoid rule otherwise.
pub fn cumulative(f: &[f64], h: f64) -> Vec<f64> {
    let m = f.len();
    let mut out = vec![0.0; m];
    if m < 4 {
        for j in 1..m {
            out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
        }
        return out;
    }
    for j in 0..m - 1 {
        let inc = if j == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if j == m - 2 {
            h / 24.0 * (9.0 * f[m - 1] + 19.0 * f[m - 2] - 5.0 * f[m - 3] + f[m - 4])
        } else {
            h / 24.0 * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2])
        };
        out[j + 1] = out[j] + inc;
    }
    out
}
