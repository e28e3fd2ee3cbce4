//! Newton collocation for periodic nonlinear eigenvalue problems
//!
//! ```text
//! -d a(u) u' + f(s(x), u) = lambda,   mean(u) = m,
//! ```
//!
//! where `s` is a known periodic source sampled on the grid. The curvature cell
//! problem and the viscous Hamilton-Jacobi cell problem are both of this form.
//!
//! Central first derivatives on an even periodic grid annihilate the sawtooth
//! `(-1)^j`, which leaves a spurious near-null direction in the Jacobian whenever
//! `mean(f_u / (d a)) = 0`. Both schemes add a stabilizing term that vanishes on
//! resolved solutions: the spectral scheme penalizes the Nyquist coefficient,
//! the stencil scheme adds the hyperviscosity `(d / 64 h) (delta^2)^3 u`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::banded::BandMatrix;
use crate::error::{Error, Result};
use crate::spectral;

/// Spatial discretization of `u'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Fourier collocation, dense Jacobian.
    Spectral,
    /// Sixth-order central differences, banded Jacobian.
    FiniteDifference,
}

/// Largest grid for which the dense spectral Jacobian is used.
pub const MAX_SPECTRAL_N: usize = 512;

const FD: [f64; 3] = [0.75, -0.15, 1.0 / 60.0];
const FD_HALF_WIDTH: usize = 3;
/// `(delta^2)^3` stencil, offsets 0..=3.
const HYPER: [f64; 4] = [-20.0, 15.0, -6.0, 1.0];
const BAND: usize = 18;

pub trait EigenFamily {
    /// `(a(u), a'(u))`
    fn diffusion(&self, u: f64) -> (f64, f64);
    /// `(f(s, u), df/du)`
    fn reaction(&self, s: f64, u: f64) -> (f64, f64);
    /// Samples of the source at `j / n`.
    fn source(&self, n: usize) -> Vec<f64>;
    fn mean_target(&self) -> f64;
    /// Constant initial guess `(u, lambda)` for a cold start.
    fn cold_start(&self) -> (f64, f64);
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tol: 1e-11,
            max_iter: 50,
        }
    }
}

/// A converged discrete solution at one value of `d`.
#[derive(Debug, Clone)]
pub struct Stage {
    pub d: f64,
    pub scheme: Scheme,
    pub u: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl Stage {
    pub fn n(&self) -> usize {
        self.u.len()
    }
}

enum Operator {
    Dense(DMatrix<f64>),
    Stencil { inv_h: f64 },
}

impl Operator {
    fn new(scheme: Scheme, n: usize) -> Self {
        match scheme {
            Scheme::Spectral => Operator::Dense(spectral::diff_matrix(n)),
            Scheme::FiniteDifference => Operator::Stencil { inv_h: n as f64 },
        }
    }

    fn apply(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Operator::Dense(d) => (d * DVector::from_column_slice(u)).as_slice().to_vec(),
            Operator::Stencil { inv_h } => {
                let n = u.len();
                (0..n)
                    .map(|j| {
                        let mut s = 0.0;
                        for (m, c) in FD.iter().enumerate() {
                            let m = m + 1;
                            s += c * (u[(j + m) % n] - u[(j + n - m) % n]);
                        }
                        s * inv_h
                    })
                    .collect()
            }
        }
    }

    /// Rough bound on the row sums of `|D|`, used for the round-off floor.
    fn norm(&self, n: usize) -> f64 {
        match self {
            Operator::Dense(_) => 2.0 * n as f64 * (n as f64).ln().max(1.0),
            Operator::Stencil { inv_h } => 2.0 * FD.iter().map(|c| c.abs()).sum::<f64>() * inv_h,
        }
    }
}

struct Discrete<'a, F: EigenFamily + ?Sized> {
    family: &'a F,
    d: f64,
    source: Vec<f64>,
    op: Operator,
    target: f64,
}

impl<'a, F: EigenFamily + ?Sized> Discrete<'a, F> {
    /// Collocation residuals followed by the mean constraint; also returns `u'`.
    fn residual(&self, u: &[f64], lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let du = self.op.apply(u);
        let n = u.len();
        let stab = self.stabilization(u);
        let mut r = Vec::with_capacity(n + 1);
        for j in 0..n {
            let (a, _) = self.family.diffusion(u[j]);
            let (f, _) = self.family.reaction(self.source[j], u[j]);
            r.push(-self.d * a * du[j] + f - lambda + stab[j]);
        }
        r.push(spectral::mean(u) - self.target);
        (r, du)
    }

    fn stabilization(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        match self.op {
            Operator::Dense(_) => {
                let c = PI * self.d * u.iter().enumerate().map(|(k, x)| if k % 2 == 0 { *x } else { -*x }).sum::<f64>();
                (0..n).map(|j| if j % 2 == 0 { c } else { -c }).collect()
            }
            Operator::Stencil { inv_h } => {
                let s = self.d * inv_h / 64.0;
                (0..n)
                    .map(|j| {
                        let mut acc = HYPER[0] * u[j];
                        for m in 1..=3 {
                            acc += HYPER[m] * (u[(j + m) % n] + u[(j + n - m) % n]);
                        }
                        s * acc
                    })
                    .collect()
            }
        }
    }

    fn floor(&self, u: &[f64], lambda: f64) -> f64 {
        let n = u.len();
        let mut amax: f64 = 0.0;
        let mut fmax: f64 = 0.0;
        let mut umax: f64 = 0.0;
        for j in 0..n {
            amax = amax.max(self.family.diffusion(u[j]).0.abs());
            fmax = fmax.max(self.family.reaction(self.source[j], u[j]).0.abs());
            umax = umax.max(u[j].abs());
        }
        8.0 * f64::EPSILON * (self.d * amax * self.op.norm(n) * umax + fmax + lambda.abs())
    }

    /// Newton correction `(du, dlambda)`.
    fn step(&self, u: &[f64], du: &[f64], r: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = u.len();
        let diag: Vec<f64> = (0..n)
            .map(|j| {
                let (_, da) = self.family.diffusion(u[j]);
                let (_, df) = self.family.reaction(self.source[j], u[j]);
                -self.d * da * du[j] + df
            })
            .collect();
        let coef: Vec<f64> = (0..n).map(|j| -self.d * self.family.diffusion(u[j]).0).collect();
        match &self.op {
            Operator::Dense(dm) => {
                let mut jac = DMatrix::<f64>::zeros(n + 1, n + 1);
                for j in 0..n {
                    for k in 0..n {
                        jac[(j, k)] = coef[j] * dm[(j, k)];
                    }
                    jac[(j, j)] += diag[j];
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    for k in 0..n {
                        jac[(j, k)] += if k % 2 == 0 { PI * self.d * sign } else { -PI * self.d * sign };
                    }
                    jac[(j, n)] = -1.0;
                    jac[(n, j)] = 1.0 / n as f64;
                }
                let rhs = DVector::from_iterator(n + 1, r.iter().map(|x| -x));
                let x = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SingularJacobian);
                }
                Ok((x.as_slice()[..n].to_vec(), x[n]))
            }
            Operator::Stencil { inv_h } => {
                let (x, dl) = self.banded_step(&coef, &diag, *inv_h, r)?;
                Ok((x, dl))
            }
        }
    }

    /// Zig-zag ordering makes the periodic stencil banded; the eigenvalue column and
    /// the mean row are carried by per-position copies of `lambda` and a running sum.
    fn banded_step(&self, coef: &[f64], diag: &[f64], inv_h: f64, r: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = coef.len();
        let pos = |t: usize| if t % 2 == 0 { t / 2 } else { n - 1 - (t - 1) / 2 };
        let slot = |i: usize| if 2 * i < n { 2 * i } else { 2 * (n - 1 - i) + 1 };
        let mut a = BandMatrix::zeros(3 * n, BAND, BAND);
        let mut rhs = vec![0.0; 3 * n];
        for t in 0..n {
            let i = pos(t);
            let row = 3 * t;
            let s = self.d * inv_h / 64.0;
            a.add(row, row, diag[i] + s * HYPER[0]);
            for (m, c) in FD.iter().enumerate() {
                let m = m + 1;
                let w = coef[i] * c * inv_h;
                a.add(row, 3 * slot((i + m) % n), w + s * HYPER[m]);
                a.add(row, 3 * slot((i + n - m) % n), -w + s * HYPER[m]);
            }
            a.add(row, row + 1, -1.0);
            rhs[row] = -r[i];
            if t + 1 < n {
                a.add(row + 1, row + 1, 1.0);
                a.add(row + 1, row + 4, -1.0);
            } else {
                a.add(row + 1, row + 2, 1.0);
                rhs[row + 1] = -r[n];
            }
            a.add(row + 2, row + 2, 1.0);
            if t > 0 {
                a.add(row + 2, row - 1, -1.0);
            }
            a.add(row + 2, row, -1.0 / n as f64);
        }
        a.factor()?;
        a.solve(&mut rhs);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        let du = (0..n).map(|i| rhs[3 * slot(i)]).collect();
        Ok((du, rhs[1]))
    }
}

fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// Damped Newton iteration on a fixed grid.
pub fn solve_on_grid<F: EigenFamily + ?Sized>(
    family: &F,
    d: f64,
    scheme: Scheme,
    mut u: Vec<f64>,
    mut lambda: f64,
    settings: &NewtonSettings,
) -> Result<Stage> {
    let n = u.len();
    if n < 8 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!("grid size {n} must be even and at least 8")));
    }
    if scheme == Scheme::FiniteDifference && n < 4 * FD_HALF_WIDTH {
        return Err(Error::InvalidInput("grid too small for the stencil".into()));
    }
    let disc = Discrete {
        family,
        d,
        source: family.source(n),
        op: Operator::new(scheme, n),
        target: family.mean_target(),
    };
    let (mut r, mut du) = disc.residual(&u, lambda);
    let mut norm = sup(&r);
    let mut iterations = 0;
    while iterations < settings.max_iter {
        if !norm.is_finite() {
            break;
        }
        if norm <= settings.tol {
            return Ok(Stage { d, scheme, u, lambda, residual: norm, iterations });
        }
        iterations += 1;
        let (du_step, dl) = disc.step(&u, &du, &r)?;
        let mut s = 1.0;
        let mut accepted = false;
        while s >= 1.0 / 1024.0 {
            let trial: Vec<f64> = u.iter().zip(&du_step).map(|(a, b)| a + s * b).collect();
            let trial_lambda = lambda + s * dl;
            let (tr, tdu) = disc.residual(&trial, trial_lambda);
            let tn = sup(&tr);
            if tn.is_finite() && (tn < (1.0 - 1e-4 * s) * norm || tn <= settings.tol) {
                u = trial;
                lambda = trial_lambda;
                r = tr;
                du = tdu;
                norm = tn;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            if norm <= settings.tol.max(disc.floor(&u, lambda)) {
                return Ok(Stage { d, scheme, u, lambda, residual: norm, iterations });
            }
            break;
        }
    }
    if norm <= settings.tol {
        return Ok(Stage { d, scheme, u, lambda, residual: norm, iterations });
    }
    Err(Error::NoConvergence { d, residual: norm, iterations })
}

/// Largest `d` at which a cold start is attempted before escalating.
pub const COLD_START_D: f64 = 1.0;
const MAX_ESCALATIONS: usize = 24;
const MIN_STEP_RATIO: f64 = 1.001;

/// Solves at `d_target` by continuation in `d`, starting from `start` if given or from a
/// cold start at `max(d_target, 1)`. `grid` chooses the discretization for each `d`.
/// Returns the final stage and the number of continuation solves.
pub fn continue_to<F: EigenFamily + ?Sized>(
    family: &F,
    d_target: f64,
    start: Option<&Stage>,
    grid: &dyn Fn(f64) -> (Scheme, usize),
    settings: &NewtonSettings,
) -> Result<(Stage, usize)> {
    if !(d_target > 0.0 && d_target.is_finite()) {
        return Err(Error::InvalidInput(format!("d must be positive and finite, got {d_target}")));
    }
    let attempt = |d: f64, from: Option<&Stage>| -> Result<Stage> {
        let (scheme, n) = grid(d);
        let (u0, l0) = match from {
            Some(st) => (spectral::resample(&st.u, n), st.lambda),
            None => {
                let (c, l) = family.cold_start();
                (vec![c; n], l)
            }
        };
        solve_on_grid(family, d, scheme, u0, l0, settings)
    };
    let mut steps = 0;
    let mut current = match start {
        Some(st) => {
            steps += 1;
            if let Ok(done) = attempt(d_target, Some(st)) {
                return Ok((done, steps));
            }
            st.clone()
        }
        None => {
            let mut d0 = d_target.max(COLD_START_D);
            let mut found = None;
            let mut last_err = None;
            for _ in 0..MAX_ESCALATIONS {
                steps += 1;
                match attempt(d0, None) {
                    Ok(st) => {
                        found = Some(st);
                        break;
                    }
                    Err(e) => {
                        last_err = Some(e);
                        d0 *= 2.0;
                    }
                }
            }
            match found {
                Some(st) => st,
                None => return Err(last_err.unwrap_or(Error::NoConvergence { d: d_target, residual: f64::NAN, iterations: 0 })),
            }
        }
    };
    while current.d != d_target {
        let ratio = d_target / current.d;
        let mut next = if ratio < 0.5 {
            current.d * 0.5
        } else if ratio > 2.0 {
            current.d * 2.0
        } else {
            d_target
        };
        loop {
            steps += 1;
            match attempt(next, Some(&current)) {
                Ok(st) => {
                    current = st;
                    break;
                }
                Err(e) => {
                    let mid = (current.d * next).sqrt();
                    let r = (mid / current.d).max(current.d / mid);
                    if r < MIN_STEP_RATIO {
                        return Err(e);
                    }
                    next = mid;
                }
            }
        }
    }
    Ok((current, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `-d u' + u^2/2 + cos(2 pi x) = lambda`, mean zero.
    struct Riccati;

    impl EigenFamily for Riccati {
        fn diffusion(&self, _u: f64) -> (f64, f64) {
            (1.0, 0.0)
        }
        fn reaction(&self, s: f64, u: f64) -> (f64, f64) {
            (0.5 * u * u + s, u)
        }
        fn source(&self, n: usize) -> Vec<f64> {
            (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).cos()).collect()
        }
        fn mean_target(&self) -> f64 {
            0.0
        }
        fn cold_start(&self) -> (f64, f64) {
            (0.0, 0.0)
        }
    }

    #[test]
    fn schemes_agree() {
        let s = NewtonSettings::default();
        let a = solve_on_grid(&Riccati, 0.5, Scheme::Spectral, vec![0.0; 128], 0.0, &s).unwrap();
        let b = solve_on_grid(&Riccati, 0.5, Scheme::FiniteDifference, vec![0.0; 2048], 0.0, &s).unwrap();
        assert!(a.residual <= 1e-11 && b.residual <= 1e-11);
        assert!((a.lambda - b.lambda).abs() < 1e-10, "{} vs {}", a.lambda, b.lambda);
        assert!(spectral::mean(&b.u).abs() < 1e-12);
    }

    #[test]
    fn continuation_reaches_small_d() {
        let s = NewtonSettings::default();
        let grid = |d: f64| {
            if d >= 0.05 {
                (Scheme::Spectral, 256)
            } else {
                (Scheme::FiniteDifference, 4096)
            }
        };
        let (st, steps) = continue_to(&Riccati, 0.02, None, &grid, &s).unwrap();
        assert!(steps > 1);
        assert_eq!(st.d, 0.02);
        assert!(st.residual <= 1e-11);
    }

    #[test]
    fn rejects_bad_d() {
        let grid = |_d: f64| (Scheme::Spectral, 64);
        assert!(continue_to(&Riccati, 0.0, None, &grid, &NewtonSettings::default()).is_err());
        assert!(continue_to(&Riccati, -1.0, None, &grid, &NewtonSettings::default()).is_err());
    }
}
