//! The viscous curvature cell problem for shear flows.
//!
//! With `phi = (mu + w') / gamma` and `gamma > 0` the cell problem reads
//!
//! ```text
//! -d phi' / (1 + phi^2) + sqrt(1 + phi^2) + v = E,   mean(phi) = mu / gamma,
//! ```
//!
//! and the flame speed is `H = gamma E`. See `docs/alpha.md` for the derivative
//! `alpha = dE/dd` computed by [`alpha_from_formula`].

use serde::{Deserialize, Serialize};

use crate::collocation::{self, EigenFamily, NewtonSettings, Scheme, Stage, MAX_SPECTRAL_N};
use crate::error::{Error, Result};
use crate::flow::{normalize, FlowProfile, FlowSpec, Momentum, NormalizedProblem};
use crate::quadrature;
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Fixed grid size; chosen from `d` when absent.
    pub grid_n: Option<usize>,
    /// Fixed scheme; spectral up to 512 points, finite differences above, when absent.
    pub scheme: Option<Scheme>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_n: None,
            scheme: None,
            tol: 1e-11,
            max_iter: 50,
        }
    }
}

impl SolverOptions {
    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid_n = Some(n);
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = Some(scheme);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub(crate) fn settings(&self) -> NewtonSettings {
        NewtonSettings {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let Some(n) = self.grid_n {
            if n < 64 || !n.is_power_of_two() {
                return Err(Error::InvalidInput(format!("grid_n = {n} must be a power of two >= 64")));
            }
            if self.scheme == Some(Scheme::Spectral) && n > 4096 {
                return Err(Error::InvalidInput(format!("spectral grid_n = {n} too large for a dense Jacobian")));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Below this effective `d` the banded finite-difference scheme is used.
pub const FD_THRESHOLD: f64 = 0.025;

/// Discretization used for a given `d` when no grid is prescribed.
///
/// The transition layer of `phi` has width of order `d / osc(v)`, so the
/// finite-difference grid keeps about 64 points per unit of `d_eff`.
pub fn auto_grid(d: f64, flow: &FlowProfile) -> (Scheme, usize) {
    let d_eff = d / flow.oscillation().max(1.0);
    if d_eff >= 0.1 {
        (Scheme::Spectral, 128)
    } else if d_eff >= FD_THRESHOLD {
        (Scheme::Spectral, 256)
    } else {
        let n = ((64.0 / d_eff).ceil() as usize).max(4096);
        (Scheme::FiniteDifference, n.next_power_of_two().min(1 << 21))
    }
}

pub(crate) fn grid_rule<'a>(opts: &SolverOptions, flow: &'a FlowProfile) -> impl Fn(f64) -> (Scheme, usize) + 'a {
    let opts = *opts;
    move |d: f64| match opts.grid_n {
        Some(n) => {
            let scheme = opts.scheme.unwrap_or(if n <= MAX_SPECTRAL_N {
                Scheme::Spectral
            } else {
                Scheme::FiniteDifference
            });
            (scheme, n)
        }
        None => {
            let (scheme, n) = auto_grid(d, flow);
            (opts.scheme.unwrap_or(scheme), n)
        }
    }
}

pub(crate) struct CurvatureFamily<'a> {
    pub flow: &'a FlowSpec,
    pub ratio: f64,
}

impl EigenFamily for CurvatureFamily<'_> {
    fn diffusion(&self, u: f64) -> (f64, f64) {
        let q = 1.0 + u * u;
        (1.0 / q, -2.0 * u / (q * q))
    }

    fn reaction(&self, s: f64, u: f64) -> (f64, f64) {
        let r = (1.0 + u * u).sqrt();
        (r + s, u / r)
    }

    fn source(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.flow.eval(j as f64 / n as f64).0).collect()
    }

    fn mean_target(&self) -> f64 {
        self.ratio
    }

    fn cold_start(&self) -> (f64, f64) {
        (self.ratio, (1.0 + self.ratio * self.ratio).sqrt() + self.flow.offset)
    }
}

/// Converged cell solution. `phi` and `e` refer to the normalized problem; `phi_original`,
/// `w` and `h` to the original momentum and flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSolution {
    pub d: f64,
    pub grid_n: usize,
    pub scheme: Scheme,
    pub gamma: f64,
    pub mu: f64,
    pub phi: Vec<f64>,
    pub phi_original: Vec<f64>,
    pub w: Vec<f64>,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub residual: f64,
    pub newton_iters: usize,
    pub continuation_steps: usize,
    /// `|w(1) - w(0)|` before the periodic projection.
    pub periodicity_defect: f64,
}

impl CellSolution {
    fn stage(&self) -> Stage {
        Stage {
            d: self.d,
            scheme: self.scheme,
            u: self.phi.clone(),
            lambda: self.e,
            residual: self.residual,
            iterations: self.newton_iters,
        }
    }

    /// Grid points `j / n`.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.grid_n).map(|j| j as f64 / self.grid_n as f64).collect()
    }

    pub fn max_abs_w(&self) -> f64 {
        self.w.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

fn assemble(problem: &NormalizedProblem, stage: Stage, steps: usize) -> CellSolution {
    let (gamma, mu) = (problem.gamma, problem.mu);
    let dw: Vec<f64> = stage.u.iter().map(|p| gamma * p - mu).collect();
    let (w_norm, slope) = spectral::antiderivative(&dw);
    CellSolution {
        d: stage.d,
        grid_n: stage.u.len(),
        scheme: stage.scheme,
        gamma,
        mu,
        phi_original: problem.phi_to_original(&stage.u),
        w: problem.profile_to_original(&w_norm),
        e: stage.lambda,
        h: problem.eigenvalue_to_h(stage.lambda),
        residual: stage.residual,
        newton_iters: stage.iterations,
        continuation_steps: steps,
        periodicity_defect: slope.abs(),
        phi: stage.u,
    }
}

/// Solves the cell problem at `d`, by continuation from a cold start at `max(d, 1)`.
pub fn solve_cell(problem: &NormalizedProblem, d: f64, opts: &SolverOptions) -> Result<CellSolution> {
    solve_cell_from(problem, d, opts, None)
}

/// As [`solve_cell`], continuing from a previous solution of the same problem.
pub fn solve_cell_from(
    problem: &NormalizedProblem,
    d: f64,
    opts: &SolverOptions,
    guess: Option<&CellSolution>,
) -> Result<CellSolution> {
    opts.validate()?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidInput(format!("Markstein number must be positive, got {d}")));
    }
    let family = CurvatureFamily {
        flow: &problem.flow.spec,
        ratio: problem.slope_ratio(),
    };
    let rule = grid_rule(opts, &problem.flow);
    let start = guess.map(CellSolution::stage);
    let (stage, steps) = collocation::continue_to(&family, d, start.as_ref(), &rule, &opts.settings())?;
    Ok(assemble(problem, stage, steps))
}

/// Flame speed for any momentum; `gamma = 0` takes the exact path `H = |mu|`, `w = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FlameSpeed {
    Degenerate {
        #[serde(rename = "H")]
        h: f64,
        grid_n: usize,
        w: Vec<f64>,
    },
    Cell(CellSolution),
}

impl FlameSpeed {
    pub fn h(&self) -> f64 {
        match self {
            FlameSpeed::Degenerate { h, .. } => *h,
            FlameSpeed::Cell(s) => s.h,
        }
    }

    pub fn w(&self) -> &[f64] {
        match self {
            FlameSpeed::Degenerate { w, .. } => w,
            FlameSpeed::Cell(s) => &s.w,
        }
    }
}

pub fn flame_speed(flow: &FlowProfile, p: Momentum, d: f64, opts: &SolverOptions) -> Result<FlameSpeed> {
    if !(p.gamma.is_finite() && p.mu.is_finite()) {
        return Err(Error::InvalidInput("momentum must be finite".into()));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidInput(format!("Markstein number must be positive, got {d}")));
    }
    if p.gamma == 0.0 {
        let n = opts.grid_n.unwrap_or(64);
        return Ok(FlameSpeed::Degenerate {
            h: p.mu.abs(),
            grid_n: n,
            w: vec![0.0; n],
        });
    }
    let problem = normalize(flow, p)?;
    Ok(FlameSpeed::Cell(solve_cell(&problem, d, opts)?))
}

/// `|H - (int sqrt(gamma^2 + (mu + w')^2) + gamma int v)|`, the averaged cell equation.
pub fn mean_identity_check(sol: &CellSolution, problem: &NormalizedProblem) -> f64 {
    let speed: f64 = sol.phi.iter().map(|p| (1.0 + p * p).sqrt()).sum::<f64>() / sol.phi.len() as f64;
    let g = problem.original.gamma;
    (sol.h - (g.abs() * speed + g * problem.original_flow.mean)).abs()
}

/// Pieces of the closed-form quotient for `alpha = dE/dd`, after removing the common
/// positive factor `exp(g_max - g_min)` (and `exp(g(1))` when `g(1) > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaTerms {
    pub alpha: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `g(1) = (1/d) int phi sqrt(1 + phi^2)`
    pub g1: f64,
}

/// `alpha = dE/dd` from the solved `phi` through the closed-form quotient of the
/// linearized cell equation.
pub fn alpha_from_formula(sol: &CellSolution) -> Result<f64> {
    Ok(alpha_terms(&sol.phi, sol.d)?.alpha)
}

/// [`alpha_from_formula`] on raw samples of `phi` at Markstein number `d`.
pub fn alpha_terms(phi: &[f64], d: f64) -> Result<AlphaTerms> {
    let factor = if phi.len() <= 2048 { 4 } else { 1 };
    let phi = spectral::upsample(phi, factor);
    let n = phi.len();
    let h = 1.0 / n as f64;
    let dphi = spectral::derivative(&phi);
    let q: Vec<f64> = phi.iter().map(|p| 1.0 + p * p).collect();
    let s: Vec<f64> = phi.iter().zip(&q).map(|(p, q)| p * q.sqrt()).collect();
    let (sp, sm) = spectral::antiderivative(&s);
    let g1 = sm / d;
    let lq0 = q[0].ln();
    // g on j = 0..=n
    let mut g: Vec<f64> = (0..n)
        .map(|j| q[j].ln() - lq0 + (sp[j] + sm * j as f64 * h) / d)
        .collect();
    g.push(g[0] + g1);
    let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
    // Extended index k = 0..=n+2 stands for x = (k - 1) h.
    let g_ext = |k: usize| -> f64 {
        match k {
            0 => g[n - 1] - g1,
            k if k <= n + 1 => g[k - 1],
            _ => g[1] + g1,
        }
    };
    let per = |v: &[f64], k: usize| v[(k + n - 1) % n];
    let up: Vec<f64> = (0..n + 3).map(|k| (g_ext(k) - gmax).exp()).collect();
    let down: Vec<f64> = (0..n + 3).map(|k| (-(g_ext(k) - gmin)).exp()).collect();
    let f_phi: Vec<f64> = (0..n + 3).map(|k| per(&dphi, k) * down[k]).collect();
    let f_q: Vec<f64> = (0..n + 3).map(|k| per(&q, k) * down[k]).collect();
    let i_phi = quadrature::cumulative_with_ghosts(&f_phi, h);
    let i_q = quadrature::cumulative_with_ghosts(&f_q, h);
    let eg = quadrature::cumulative_with_ghosts(&up, h)[n];
    let e1 = g1.exp();
    let nested = |inner: &[f64]| -> f64 {
        // inner(x - h) and inner(1 + h) from quasi-periodicity of the integrand.
        let total = inner[n];
        let before = -(total - inner[n - 1]) * e1;
        let after = total + inner[1] / e1;
        let ext: Vec<f64> = (0..n + 3)
            .map(|k| {
                let i = match k {
                    0 => before,
                    k if k == n + 2 => after,
                    k => inner[k - 1],
                };
                up[k] * i
            })
            .collect();
        quadrature::cumulative_with_ghosts(&ext, h)[n]
    };
    let n_phi = nested(&i_phi);
    let n_q = nested(&i_q);
    let (p1, q1) = (i_phi[n], i_q[n]);
    let (numerator, denominator) = if g1 > 0.0 {
        let c = -(-g1).exp_m1();
        (p1 * eg - c * n_phi, q1 * eg - c * n_q)
    } else {
        let c = g1.exp_m1();
        (e1 * p1 * eg - c * n_phi, e1 * q1 * eg - c * n_q)
    };
    if !(numerator.is_finite() && denominator.is_finite()) {
        return Err(Error::Quadrature("non-finite terms in the alpha quotient".into()));
    }
    if denominator <= 0.0 {
        return Err(Error::Quadrature(format!("alpha denominator {denominator:e} is not positive")));
    }
    Ok(AlphaTerms {
        alpha: -numerator / denominator + 0.0,
        numerator,
        denominator,
        g1,
    })
}

/// Markstein sweep with finite-difference and closed-form derivative columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Strictly increasing.
    pub d_values: Vec<f64>,
    #[serde(rename = "H_values")]
    pub h_values: Vec<f64>,
    #[serde(rename = "E_values")]
    pub e_values: Vec<f64>,
    /// Centered difference of `H` with step `1e-3 d` on the grid of the base solve.
    #[serde(rename = "dH_dd_fd")]
    pub dh_dd_fd: Vec<f64>,
    /// `alpha = dE/dd` from the closed form.
    #[serde(rename = "dE_dd_formula")]
    pub de_dd_formula: Vec<f64>,
    pub residuals: Vec<f64>,
    pub grid_n: Vec<usize>,
    /// Normalized `gamma`, so that `dH/dd = gamma * dE/dd`.
    pub gamma: f64,
    pub strictly_decreasing: bool,
    pub derivatives_negative: bool,
}

/// Relative step of the centered differences in [`sweep_markstein`].
pub const FD_REL_STEP: f64 = 1e-3;

impl SweepResult {
    /// `|FD - formula| / |formula|` per point, both in `dH/dd` units.
    pub fn relative_mismatch(&self) -> Vec<f64> {
        self.dh_dd_fd
            .iter()
            .zip(&self.de_dd_formula)
            .map(|(fd, a)| {
                let f = self.gamma * a;
                if f == 0.0 {
                    fd.abs()
                } else {
                    (fd - f).abs() / f.abs()
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,H,dH_dd_fd,dE_dd_formula,residual\n");
        for i in 0..self.d_values.len() {
            s.push_str(&format!(
                "{:e},{:.17e},{:.17e},{:.17e},{:e}\n",
                self.d_values[i], self.h_values[i], self.dh_dd_fd[i], self.de_dd_formula[i], self.residuals[i]
            ));
        }
        s
    }
}

/// Solves at each `d` (largest first, by continuation) and fills both derivative columns.
pub fn sweep_markstein(problem: &NormalizedProblem, d_values: &[f64], opts: &SolverOptions) -> Result<SweepResult> {
    if d_values.is_empty() {
        return Err(Error::InvalidInput("empty d schedule".into()));
    }
    if d_values.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidInput("d schedule entries must be positive".into()));
    }
    let mut ds = d_values.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    ds.dedup();
    let mut rows = Vec::with_capacity(ds.len());
    let mut prev: Option<CellSolution> = None;
    for &d in &ds {
        let base = solve_cell_from(problem, d, opts, prev.as_ref())?;
        let local = SolverOptions {
            grid_n: Some(base.grid_n),
            scheme: Some(base.scheme),
            ..*opts
        };
        let hi = solve_cell_from(problem, d * (1.0 + FD_REL_STEP), &local, Some(&base))?;
        let lo = solve_cell_from(problem, d * (1.0 - FD_REL_STEP), &local, Some(&base))?;
        let fd = (hi.h - lo.h) / (2.0 * FD_REL_STEP * d);
        let alpha = alpha_from_formula(&base)?;
        rows.push((d, base.h, base.e, fd, alpha, base.residual, base.grid_n));
        prev = Some(base);
    }
    rows.reverse();
    let h_values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let dh_dd_fd: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let de_dd_formula: Vec<f64> = rows.iter().map(|r| r.4).collect();
    Ok(SweepResult {
        d_values: rows.iter().map(|r| r.0).collect(),
        strictly_decreasing: h_values.windows(2).all(|w| w[1] < w[0]),
        derivatives_negative: dh_dd_fd.iter().chain(&de_dd_formula).all(|x| *x < 0.0),
        h_values,
        e_values: rows.iter().map(|r| r.2).collect(),
        dh_dd_fd,
        de_dd_formula,
        residuals: rows.iter().map(|r| r.5).collect(),
        grid_n: rows.iter().map(|r| r.6).collect(),
        gamma: problem.gamma,
    })
}
