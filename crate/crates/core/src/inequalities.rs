//! Numerical oracles for the inequalities behind the sign of `alpha`: the `A + B - C`
//! functionals, their split bound, the constrained discrete inequality, and its continuous
//! limit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectral;

/// Relative slack on one-sided inequality checks.
pub const SLACK_REL: f64 = 1e-9;

fn slack(lhs: f64, rhs: f64) -> f64 {
    SLACK_REL * lhs.abs().max(rhs.abs()).max(1.0)
}

/// `A`, `B`, `C` for `h(x) = int_0^x phi sqrt(1 + phi^2)` and `lambda = arctan`.
///
/// Values are divided by `exp(log_scale)` to keep them finite for steep profiles; the true
/// functionals are `a * exp(log_scale)` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbcTerms {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `a + b - c`
    pub gap: f64,
    pub log_scale: f64,
    /// `h(1)`
    pub h1: f64,
}

impl AbcTerms {
    /// `(A, B, C, A + B - C)` without the scaling.
    pub fn unscaled(&self) -> (f64, f64, f64, f64) {
        let s = self.log_scale.exp();
        (self.a * s, self.b * s, self.c * s, self.gap * s)
    }
}

fn fine_samples(phi: &[f64]) -> Vec<f64> {
    let factor = if phi.len() <= 2048 { 4 } else { 1 };
    spectral::upsample(phi, factor)
}

/// Periodic samples `phi_j = phi(j / n)`, closed to `n + 1` points.
fn closed(phi: &[f64]) -> Vec<f64> {
    let mut v = phi.to_vec();
    v.push(phi[0]);
    v
}

fn abc_on_grid(phi: &[f64]) -> AbcTerms {
    let n = phi.len();
    let step = 1.0 / n as f64;
    let p = closed(phi);
    let q: Vec<f64> = p.iter().map(|x| 1.0 + x * x).collect();
    let lam: Vec<f64> = p.iter().map(|x| x.atan()).collect();
    let jac: Vec<f64> = p.iter().zip(&q).map(|(x, q)| x * q.sqrt()).collect();
    let h: Vec<f64> = quadrature::cumulative(&jac, step);
    let h1 = h[n];
    let hmax = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hmin = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let inner: Vec<f64> = q.iter().zip(&h).map(|(q, h)| q * (h - hmax).exp()).collect();
    let pint = quadrature::cumulative(&inner, step);
    let p1 = pint[n];
    let weight: Vec<f64> = (0..=n).map(|j| lam[j] * jac[j] * (-(h[j] - hmin)).exp()).collect();
    let a_int: Vec<f64> = (0..=n).map(|j| weight[j] * pint[j]).collect();
    let b_int: Vec<f64> = (0..=n).map(|j| weight[j] * (p1 - pint[j])).collect();
    let a_t = quadrature::cumulative(&a_int, step)[n];
    let b_t = quadrature::cumulative(&b_int, step)[n];
    let lq: Vec<f64> = lam.iter().zip(&q).map(|(l, q)| l * q).collect();
    let c_t = quadrature::cumulative(&lq, step)[n];
    let s = hmax - hmin + h1.max(0.0);
    let a = (h1 - h1.max(0.0)).exp() * a_t;
    let b = (-h1.max(0.0)).exp() * b_t;
    let c = h1.exp_m1() * (-s).exp() * c_t;
    AbcTerms {
        a,
        b,
        c,
        gap: a + b - c,
        log_scale: s,
        h1,
    }
}

/// `A`, `B`, `C` and `A + B - C` from periodic samples `phi(j / n)`.
pub fn abc_functionals(phi: &[f64]) -> Result<AbcTerms> {
    check_profile(phi)?;
    Ok(abc_on_grid(&fine_samples(phi)))
}

fn check_profile(phi: &[f64]) -> Result<()> {
    if phi.len() < 8 {
        return Err(Error::InvalidInput("profile needs at least 8 samples".into()));
    }
    if phi.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("profile has non-finite samples".into()));
    }
    Ok(())
}

/// Both sides of `A(phi) + B(phi) - C(phi) >= exp(h_-(1)) (A + B - C)(phi_+)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitReport {
    /// In units of `exp(log_scale)`.
    pub lhs: f64,
    pub rhs: f64,
    pub log_scale: f64,
    /// `h_-(1)` of the profile actually checked.
    pub h_minus_1: f64,
    /// `h(1)` of the input profile.
    pub h1: f64,
    /// The input had `h(1) < 0` and was replaced by `-phi(-x)`, which multiplies `A + B - C`
    /// by `exp(-h(1)) > 0`.
    pub reflected: bool,
    /// `phi_- = 0` on the checked profile.
    pub nonnegative: bool,
    pub equality: bool,
    pub pass: bool,
}

/// Checks the split bound. The bound needs `h(1) >= 0`; inputs with `h(1) < 0` are reflected first.
pub fn split_inequality_check(phi: &[f64]) -> Result<SplitReport> {
    check_profile(phi)?;
    let mut fine = fine_samples(phi);
    let full = abc_on_grid(&fine);
    let h1 = full.h1;
    let reflected = h1 < 0.0;
    if reflected {
        let n = fine.len();
        fine = (0..n).map(|j| -fine[(n - j) % n]).collect();
    }
    let full = abc_on_grid(&fine);
    let plus: Vec<f64> = fine.iter().map(|x| x.max(0.0)).collect();
    let minus: Vec<f64> = fine.iter().map(|x| x.min(0.0)).collect();
    let nonnegative = minus.iter().all(|x| *x == 0.0);
    let jm: Vec<f64> = closed(&minus).iter().map(|x| x * (1.0 + x * x).sqrt()).collect();
    let h_minus_1 = quadrature::cumulative(&jm, 1.0 / fine.len() as f64)[fine.len()];
    let part = abc_on_grid(&plus);
    let lhs = full.gap;
    let rhs = part.gap * (h_minus_1 + part.log_scale - full.log_scale).exp();
    let tol = slack(lhs, rhs);
    Ok(SplitReport {
        lhs,
        rhs,
        log_scale: full.log_scale,
        h_minus_1,
        h1,
        reflected,
        nonnegative,
        equality: (lhs - rhs).abs() <= tol,
        pass: lhs >= rhs - tol,
    })
}

/// Monotone test functions `g` for the discrete and continuous inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GSpec {
    /// `1 / sin y` on `(0, pi/2]`
    InvSin,
    /// `exp(-k y)`, `k > 0`
    Exp { k: f64 },
    /// `intercept + slope y`
    Linear { intercept: f64, slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `g' <= -theta`
    Decreasing,
    /// `g' >= theta`
    Increasing,
}

impl GSpec {
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            GSpec::InvSin => 1.0 / y.sin(),
            GSpec::Exp { k } => (-k * y).exp(),
            GSpec::Linear { intercept, slope } => intercept + slope * y,
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match *self {
            GSpec::InvSin => -y.cos() / (y.sin() * y.sin()),
            GSpec::Exp { k } => -k * (-k * y).exp(),
            GSpec::Linear { slope, .. } => slope,
        }
    }

    /// Largest `theta` with `g' <= -theta` (decreasing) or `g' >= theta` (increasing) on
    /// `[lo, hi]`; `None` if `g` is not monotone that way there.
    pub fn theta(&self, lo: f64, hi: f64, direction: Direction) -> Option<f64> {
        if !(lo > 0.0 && hi >= lo) {
            return None;
        }
        let t = match (*self, direction) {
            (GSpec::InvSin, Direction::Decreasing) if hi <= std::f64::consts::FRAC_PI_2 => -self.derivative(hi),
            (GSpec::Exp { k }, Direction::Decreasing) if k > 0.0 => -self.derivative(hi),
            (GSpec::Linear { slope, .. }, Direction::Decreasing) if slope <= 0.0 => -slope,
            (GSpec::Linear { slope, .. }, Direction::Increasing) if slope >= 0.0 => slope,
            _ => return None,
        };
        Some(t.max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    /// Right side without the quadratic term.
    pub rhs: f64,
    /// `lhs - rhs`
    pub gap: f64,
    pub quadratic_term: f64,
    /// `(gap - quadratic_term) / max(|lhs|, |rhs|, 1)`, with the gap sign flipped for increasing `g`.
    pub margin: f64,
    pub equality: bool,
    pub pass: bool,
}

fn report(lhs: f64, rhs: f64, quadratic_term: f64, direction: Direction) -> InequalityReport {
    let gap = lhs - rhs;
    let tol = slack(lhs, rhs);
    let signed = match direction {
        Direction::Decreasing => gap,
        Direction::Increasing => -gap,
    };
    InequalityReport {
        lhs,
        rhs,
        gap,
        quadratic_term,
        margin: (signed - quadratic_term) / lhs.abs().max(rhs.abs()).max(1.0),
        equality: gap.abs() <= tol,
        pass: signed >= quadratic_term - tol,
    }
}

/// The continuous inequality for `f` sampled at `x_j = j T / m`, `j = 0..=m`.
pub fn continuous_inequality(
    f: &[f64],
    t: f64,
    g: &GSpec,
    theta: f64,
    direction: Direction,
) -> Result<InequalityReport> {
    if f.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 samples of f".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon T must be positive, got {t}")));
    }
    if f.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput("f must be positive on [0, T]".into()));
    }
    if !(theta >= 0.0) {
        return Err(Error::InvalidInput(format!("theta must be non-negative, got {theta}")));
    }
    let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match g.theta(lo, hi, direction) {
        Some(cert) if theta <= cert * (1.0 + 1e-12) => {}
        cert => {
            return Err(Error::InvalidInput(format!(
                "g does not satisfy the monotonicity bound theta = {theta} on [{lo}, {hi}] (certified {cert:?})"
            )))
        }
    }
    let m = f.len() - 1;
    let step = t / m as f64;
    let x = |j: usize| j as f64 * step;
    let gf: Vec<f64> = f.iter().map(|v| g.value(*v)).collect();
    let inner: Vec<f64> = (0..=m).map(|j| gf[j] * x(j).exp()).collect();
    let big_i = quadrature::cumulative(&inner, step);
    let it = big_i[m];
    let et = t.exp();
    let outer: Vec<f64> = (0..=m)
        .map(|j| f[j] * (-x(j)).exp() * (et * big_i[j] + it - big_i[j]))
        .collect();
    let lhs = quadrature::cumulative(&outer, step)[m];
    let fg: Vec<f64> = f.iter().zip(&gf).map(|(a, b)| a * b).collect();
    let rhs = t.exp_m1() * quadrature::cumulative(&fg, step)[m];
    let mean = quadrature::cumulative(f, step)[m] / t;
    let centered: Vec<f64> = f.iter().map(|v| (v - mean) * (v - mean)).collect();
    // int int |f(x) - f(y)|^2 = 2 T int (f - mean)^2
    let double = if hi > lo { 2.0 * t * quadrature::cumulative(&centered, step)[m] } else { 0.0 };
    Ok(report(lhs, rhs, 0.5 * theta * double.max(0.0), direction))
}

/// Weights `b` (lower triangle, `k <= i`) and `b_tilde` (upper triangle, `k >= i`) with
/// all row and column sums equal to `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintWeights {
    pub n: usize,
    pub b: Vec<Vec<f64>>,
    pub b_tilde: Vec<Vec<f64>>,
    pub c: f64,
    pub tau: f64,
    /// Largest deviation of a sum constraint from `c`.
    pub residual: f64,
    pub min_entry: f64,
    pub warning: Option<String>,
}

/// Unknowns: `b[i][k]` for `k <= i`, then `b_tilde[i][k]` for `k >= i`.
fn index_map(n: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let lower = (0..n).flat_map(|i| (0..=i).map(move |k| (i, k))).collect();
    let upper = (0..n).flat_map(|i| (i..n).map(move |k| (i, k))).collect();
    (lower, upper)
}

fn constraint_matrix(n: usize) -> DMatrix<f64> {
    let (lower, upper) = index_map(n);
    let m = lower.len() + upper.len();
    let mut a = DMatrix::zeros(2 * n, m);
    for (col, &(i, k)) in lower.iter().enumerate() {
        a[(i, col)] = 1.0;
        a[(n + k, col)] = 1.0;
    }
    for (off, &(i, k)) in upper.iter().enumerate() {
        let col = lower.len() + off;
        a[(i, col)] = 1.0;
        a[(n + k, col)] = 1.0;
    }
    a
}

fn constraint_residual(w: &ConstraintWeights) -> f64 {
    let n = w.n;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let row: f64 = (0..=i).map(|l| w.b[i][l]).sum::<f64>() + (i..n).map(|l| w.b_tilde[i][l]).sum::<f64>();
        let col: f64 = (i..n).map(|l| w.b[l][i]).sum::<f64>() + (0..=i).map(|l| w.b_tilde[l][i]).sum::<f64>();
        worst = worst.max((row - w.c).abs()).max((col - w.c).abs());
    }
    worst
}

fn min_entry(w: &ConstraintWeights) -> f64 {
    let n = w.n;
    let mut m = f64::INFINITY;
    for i in 0..n {
        for k in 0..=i {
            m = m.min(w.b[i][k]);
        }
        for k in i..n {
            m = m.min(w.b_tilde[i][k]);
        }
    }
    m
}

/// The exponential instance `b_ik = exp(T - x_i + x_k)`, `b_tilde_ik = exp(x_k - x_i)`,
/// `x_i = i T / n`, with `c = (exp(T + T/n) - 1) / (exp(T/n) - 1)`.
pub fn canonical_weights(n: usize, t: f64) -> Result<ConstraintWeights> {
    if n < 1 || !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("need n >= 1 and T > 0, got n = {n}, T = {t}")));
    }
    let x = |i: usize| (i + 1) as f64 * t / n as f64;
    let mut b = vec![vec![0.0; n]; n];
    let mut bt = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..=i {
            b[i][k] = (t - x(i) + x(k)).exp();
        }
        for k in i..n {
            bt[i][k] = (x(k) - x(i)).exp();
        }
    }
    let r = t / n as f64;
    let c = (t + r).exp_m1() / r.exp_m1();
    let mut w = ConstraintWeights {
        n,
        b,
        b_tilde: bt,
        c,
        tau: 1.0,
        residual: 0.0,
        min_entry: 0.0,
        warning: None,
    };
    w.residual = constraint_residual(&w);
    w.min_entry = min_entry(&w);
    Ok(w)
}

/// Canonical weights plus a random perturbation in the null space of the sum constraints,
/// scaled so that every entry stays `>= tau`.
pub fn random_constraint_weights(n: usize, t: f64, tau: f64, seed: u64) -> Result<ConstraintWeights> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need n >= 2, got {n}")));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let mut w = canonical_weights(n, t)?;
    w.tau = tau;
    let (lower, upper) = index_map(n);
    let x0: Vec<f64> = lower
        .iter()
        .map(|&(i, k)| w.b[i][k])
        .chain(upper.iter().map(|&(i, k)| w.b_tilde[i][k]))
        .collect();
    let lo = x0.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo < tau {
        w.warning = Some(format!(
            "tau = {tau} exceeds the smallest canonical entry {lo}; perturbation scaled to zero"
        ));
        return Ok(w);
    }
    let a = constraint_matrix(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = DVector::from_iterator(x0.len(), (0..x0.len()).map(|_| rng.sample::<f64, _>(StandardNormal)));
    // project onto ker A: z - A^T (A A^T)^+ A z
    let aat = &a * a.transpose();
    let eig = SymmetricEigen::new(aat);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let az = &a * &z;
    let mut y = DVector::zeros(2 * n);
    for (j, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev > 1e-12 * top {
            let v = eig.eigenvectors.column(j);
            y += v * (v.dot(&az) / ev);
        }
    }
    let p = &z - a.transpose() * y;
    let mut s_max = f64::INFINITY;
    for (xi, pi) in x0.iter().zip(p.iter()) {
        if *pi < 0.0 {
            s_max = s_max.min((xi - tau) / -pi);
        }
    }
    if !s_max.is_finite() {
        s_max = 1.0;
    }
    let s = rng.random::<f64>() * s_max;
    for (col, &(i, k)) in lower.iter().enumerate() {
        w.b[i][k] = (x0[col] + s * p[col]).max(tau);
    }
    for (off, &(i, k)) in upper.iter().enumerate() {
        let col = lower.len() + off;
        w.b_tilde[i][k] = (x0[col] + s * p[col]).max(tau);
    }
    w.residual = constraint_residual(&w);
    w.min_entry = min_entry(&w);
    Ok(w)
}

/// `W(a) >= c sum a_i g(a_i) + (theta tau / 2) sum_{i,k} (a_i - a_k)^2`.
pub fn discrete_inequality(
    a: &[f64],
    weights: &ConstraintWeights,
    g: &GSpec,
    theta: f64,
    tau: f64,
    c: f64,
) -> Result<InequalityReport> {
    let n = weights.n;
    if a.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} values, got {}", a.len())));
    }
    if a.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput("values must be positive".into()));
    }
    let check = ConstraintWeights { c, ..weights.clone() };
    let res = constraint_residual(&check);
    if res > 1e-10 * c.abs().max(1.0) {
        return Err(Error::Constraint(format!("sum constraints violated by {res:e}")));
    }
    let floor = min_entry(weights);
    if floor < tau * (1.0 - 1e-12) {
        return Err(Error::Constraint(format!("entry {floor} below the floor tau = {tau}")));
    }
    let lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match g.theta(lo, hi, Direction::Decreasing) {
        Some(cert) if theta <= cert * (1.0 + 1e-12) => {}
        cert => {
            return Err(Error::InvalidInput(format!(
                "g' <= -theta fails for theta = {theta} on [{lo}, {hi}] (certified {cert:?})"
            )))
        }
    }
    let ga: Vec<f64> = a.iter().map(|v| g.value(*v)).collect();
    let mut lhs = 0.0;
    for i in 0..n {
        let lower: f64 = (0..=i).map(|k| ga[k] * weights.b[i][k]).sum();
        let upper: f64 = (i..n).map(|k| ga[k] * weights.b_tilde[i][k]).sum();
        lhs += a[i] * (lower + upper);
    }
    let rhs = c * a.iter().zip(&ga).map(|(x, y)| x * y).sum::<f64>();
    let mut sq = 0.0;
    for x in a {
        for y in a {
            sq += (x - y) * (x - y);
        }
    }
    Ok(report(lhs, rhs, 0.5 * theta * tau * sq, Direction::Decreasing))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub discrete_cases: usize,
    pub continuous_cases: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            discrete_cases: 1000,
            continuous_cases: 200,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseFailure {
    pub kind: String,
    pub index: usize,
    /// Reproduces the case through [`discrete_case`] or [`continuous_case`].
    pub case_seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases_run: usize,
    pub discrete_cases: usize,
    pub continuous_cases: usize,
    pub equality_cases: usize,
    /// Smallest `(signed gap - quadratic term) / max(|lhs|, |rhs|, 1)` over strict cases.
    pub min_margin: f64,
    pub failures: Vec<CaseFailure>,
    pub pass: bool,
}

/// Per-case seed, independent of how cases are scheduled.
pub fn case_seed(seed: u64, kind: u64, index: usize) -> u64 {
    let mut x = seed ^ kind.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn random_decreasing_g(rng: &mut ChaCha8Rng) -> (GSpec, f64) {
    match rng.random_range(0..3) {
        0 => {
            let m: f64 = rng.random_range(0.5..10.0);
            (GSpec::InvSin, m.atan())
        }
        1 => (GSpec::Exp { k: rng.random_range(0.2..3.0) }, rng.random_range(0.5..3.0)),
        _ => (
            GSpec::Linear {
                intercept: rng.random_range(-1.0..5.0),
                slope: -rng.random_range(0.0..2.0),
            },
            rng.random_range(0.5..3.0),
        ),
    }
}

/// Outcome of one randomized case: the report and whether equality was expected.
pub struct CaseOutcome {
    pub report: InequalityReport,
    pub expect_equality: bool,
}

/// One random discrete case; every tenth index uses equal `a_i`.
pub fn discrete_case(case_seed: u64, equal: bool) -> Result<CaseOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let n = rng.random_range(2..=12);
    let t = rng.random_range(0.1..4.0);
    let tau = rng.random_range(0.2..1.0);
    let weights = random_constraint_weights(n, t, tau, rng.random())?;
    let (g, l) = random_decreasing_g(&mut rng);
    let a: Vec<f64> = if equal {
        vec![rng.random_range(0.05..1.0) * l; n]
    } else {
        (0..n).map(|_| rng.random_range(0.02..1.0) * l).collect()
    };
    let lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cert = g.theta(lo, hi, Direction::Decreasing).unwrap_or(0.0);
    let theta = if rng.random_bool(0.1) { 0.0 } else { cert };
    let report = discrete_inequality(&a, &weights, &g, theta, tau, weights.c)?;
    Ok(CaseOutcome {
        report,
        expect_equality: equal,
    })
}

/// Samples of a random positive trigonometric profile on `[0, T]`, scaled into `(0, l]`.
fn random_profile(rng: &mut ChaCha8Rng, t: f64, l: f64, m: usize) -> Vec<f64> {
    let modes = rng.random_range(1..=3);
    let amps: Vec<(f64, f64, f64)> = (0..modes)
        .map(|k| {
            (
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..std::f64::consts::TAU),
                (k + 1) as f64,
            )
        })
        .collect();
    let total: f64 = amps.iter().map(|a| a.0.abs()).sum();
    let base = total * rng.random_range(1.05..3.0) + 1e-3;
    let raw: Vec<f64> = (0..=m)
        .map(|j| {
            let x = j as f64 * t / m as f64;
            base + amps
                .iter()
                .map(|(a, ph, k)| a * (std::f64::consts::TAU * k * x / t.max(1.0) + ph).sin())
                .sum::<f64>()
        })
        .collect();
    let top = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = l * rng.random_range(0.3..1.0) / top;
    raw.into_iter().map(|v| v * scale).collect()
}

/// Grid intervals for continuous cases.
pub const CONTINUOUS_GRID: usize = 4096;

/// One random continuous case; `constant` selects a constant `f`.
pub fn continuous_case(case_seed: u64, constant: bool) -> Result<CaseOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let t = rng.random_range(0.2..4.0);
    let increasing = rng.random_bool(0.2);
    let (g, l, direction) = if increasing {
        (
            GSpec::Linear {
                intercept: rng.random_range(-1.0..1.0),
                slope: rng.random_range(0.0..2.0),
            },
            rng.random_range(0.5..3.0),
            Direction::Increasing,
        )
    } else {
        let (g, l) = random_decreasing_g(&mut rng);
        (g, l, Direction::Decreasing)
    };
    let f = if constant {
        vec![l * rng.random_range(0.1..1.0); CONTINUOUS_GRID + 1]
    } else {
        random_profile(&mut rng, t, l, CONTINUOUS_GRID)
    };
    let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let theta = g.theta(lo, hi, direction).unwrap_or(0.0);
    let report = continuous_inequality(&f, t, &g, theta, direction)?;
    Ok(CaseOutcome {
        report,
        expect_equality: constant,
    })
}

const DISCRETE_KIND: u64 = 1;
const CONTINUOUS_KIND: u64 = 2;

/// Randomized discrete and continuous cases; each case has its own seed, so the
/// result does not depend on scheduling.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    type Row = (String, usize, u64, bool, Result<CaseOutcome>);
    let discrete = (0..cfg.discrete_cases).into_par_iter().map(|i| -> Row {
        let s = case_seed(cfg.seed, DISCRETE_KIND, i);
        let equal = i % 10 == 9;
        ("discrete".into(), i, s, equal, discrete_case(s, equal))
    });
    let continuous = (0..cfg.continuous_cases).into_par_iter().map(|i| -> Row {
        let s = case_seed(cfg.seed, CONTINUOUS_KIND, i);
        let constant = i % 10 == 9;
        ("continuous".into(), i, s, constant, continuous_case(s, constant))
    });
    let rows: Vec<Row> = discrete.chain(continuous).collect();
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut equality_cases = 0;
    for (kind, index, seed, equal, outcome) in rows {
        let fail = |detail: String| CaseFailure {
            kind: kind.clone(),
            index,
            case_seed: seed,
            detail,
        };
        match outcome {
            Err(e) => failures.push(fail(format!("case could not be evaluated: {e}"))),
            Ok(o) => {
                let r = o.report;
                if equal {
                    equality_cases += 1;
                    if !r.equality {
                        failures.push(fail(format!("equality expected, gap = {:e}", r.gap)));
                    }
                } else {
                    min_margin = min_margin.min(r.margin);
                }
                if !r.pass {
                    failures.push(fail(format!(
                        "gap {:e} below quadratic term {:e} (lhs {:e}, rhs {:e})",
                        r.gap, r.quadratic_term, r.lhs, r.rhs
                    )));
                }
            }
        }
    }
    SuiteReport {
        seed: cfg.seed,
        cases_run: cfg.discrete_cases + cfg.continuous_cases,
        discrete_cases: cfg.discrete_cases,
        continuous_cases: cfg.continuous_cases,
        equality_cases,
        min_margin,
        pass: failures.is_empty(),
        failures,
    }
}
