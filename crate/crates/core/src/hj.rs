//! The 1-D viscous Hamilton-Jacobi cell problem `-d w'' + H(p + w') + G(x) = Hbar(p, d)`,
//! solved for `u = p + w'` with mean `p` by the same collocation engine as the curvature problem.

use serde::Serialize;

use crate::cell::{grid_rule, SolverOptions};
use crate::collocation::{self, EigenFamily, Scheme};
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::spectral;

/// A scalar Hamiltonian with its derivative.
pub trait Hamiltonian: Sync {
    /// `(H(q), H'(q))`
    fn eval(&self, q: f64) -> (f64, f64);
    fn name(&self) -> &'static str;
}

/// `q^2 / 2`
#[derive(Debug, Clone, Copy, Default)]
pub struct Quadratic;

impl Hamiltonian for Quadratic {
    fn eval(&self, q: f64) -> (f64, f64) {
        (0.5 * q * q, q)
    }
    fn name(&self) -> &'static str {
        "quadratic"
    }
}

/// `q^2 / 2 - cos q`, not convex near `q = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonConvex;

impl Hamiltonian for NonConvex {
    fn eval(&self, q: f64) -> (f64, f64) {
        (0.5 * q * q - q.cos(), q + q.sin())
    }
    fn name(&self) -> &'static str {
        "non-convex"
    }
}

/// Looks a Hamiltonian up by name.
pub fn hamiltonian_by_name(name: &str) -> Result<Box<dyn Hamiltonian>> {
    match name {
        "quadratic" => Ok(Box::new(Quadratic)),
        "non-convex" | "nonconvex" => Ok(Box::new(NonConvex)),
        _ => Err(Error::InvalidInput(format!("unknown Hamiltonian `{name}`"))),
    }
}

struct HjFamily<'a> {
    ham: &'a dyn Hamiltonian,
    g: &'a FlowProfile,
    p: f64,
}

impl EigenFamily for HjFamily<'_> {
    fn diffusion(&self, _u: f64) -> (f64, f64) {
        (1.0, 0.0)
    }
    fn reaction(&self, s: f64, u: f64) -> (f64, f64) {
        let (h, dh) = self.ham.eval(u);
        (h + s, dh)
    }
    fn source(&self, n: usize) -> Vec<f64> {
        self.g.sample(n)
    }
    fn mean_target(&self) -> f64 {
        self.p
    }
    fn cold_start(&self) -> (f64, f64) {
        (self.p, self.ham.eval(self.p).0 + self.g.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HjSolution {
    pub d: f64,
    pub p: f64,
    pub h_bar: f64,
    /// Corrector on `j / n` with `w(0) = 0`.
    pub w: Vec<f64>,
    pub grid_n: usize,
    pub scheme: Scheme,
    pub residual: f64,
}

pub fn solve_viscous_hj(
    g: &FlowProfile,
    ham: &dyn Hamiltonian,
    p: f64,
    d: f64,
    opts: &SolverOptions,
) -> Result<HjSolution> {
    opts.validate()?;
    if !p.is_finite() {
        return Err(Error::InvalidInput(format!("momentum must be finite, got {p}")));
    }
    let family = HjFamily { ham, g, p };
    let rule = grid_rule(opts, g);
    let (stage, _) = collocation::continue_to(&family, d, None, &rule, &opts.settings())?;
    let dw: Vec<f64> = stage.u.iter().map(|u| u - p).collect();
    let (w, _) = spectral::antiderivative(&dw);
    Ok(HjSolution {
        d,
        p,
        h_bar: stage.lambda,
        grid_n: w.len(),
        w,
        scheme: stage.scheme,
        residual: stage.residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HjSweep {
    pub hamiltonian: String,
    pub p: f64,
    /// Decreasing.
    pub d_values: Vec<f64>,
    pub h_values: Vec<f64>,
    /// Sign of `Hbar(d_{k+1}) - Hbar(d_k)` relative to the decrease in `d`: `+1` means `Hbar`
    /// increases with `d` on that interval.
    pub slope_signs: Vec<i8>,
    pub strictly_decreasing_in_d: bool,
}

/// `Hbar(p, d)` along `d_values`, reporting how it moves with `d`.
pub fn hj_sweep(g: &FlowProfile, ham: &dyn Hamiltonian, p: f64, d_values: &[f64], opts: &SolverOptions) -> Result<HjSweep> {
    let mut ds = d_values.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let h_values = ds
        .iter()
        .map(|&d| solve_viscous_hj(g, ham, p, d, opts).map(|s| s.h_bar))
        .collect::<Result<Vec<_>>>()?;
    // d decreases along the list, so Hbar decreasing in d means it increases along the list
    let slope_signs: Vec<i8> = h_values
        .windows(2)
        .map(|w| match (w[0] - w[1]).partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 1,
            Some(std::cmp::Ordering::Less) => -1,
            _ => 0,
        })
        .collect();
    Ok(HjSweep {
        hamiltonian: ham.name().to_string(),
        p,
        strictly_decreasing_in_d: slope_signs.iter().all(|&s| s == -1),
        d_values: ds,
        h_values,
        slope_signs,
    })
}
