//! The inviscid (`d = 0`) cell problem `sqrt(gamma^2 + (mu + w')^2) + gamma v = H0`.
//!
//! In normalized form (`gamma > 0`, `mu >= 0`, `max v = 0`) write `r = mu / gamma`,
//! `E0 = H0 / gamma` and `psi_E(y) = sqrt((E - v(y))^2 - 1)`. Then
//!
//! * if `r >= mu* = int psi_1`, `E0 >= 1` solves `int psi_E0 = r` and the solution is
//!   unique up to a constant;
//! * otherwise `E0 = 1` and every maximum point `x_i` of `v` anchors a solution with
//!   `u' = psi_1` on `[x_i, x_mu]` and `u' = -psi_1` on `[x_mu, x_i + 1]`, where
//!   `u = mu x + w` and `int_{x_i}^{x_mu} psi_1 = (r + mu*) / 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{locate_maxima, NormalizedProblem, MEMBERSHIP_TOL};
use crate::quadrature;
use crate::roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `|mu| >= mu*`
    Unique,
    /// `|mu| < mu*`
    Trapped,
}

/// Uniform samples per period of an emitted branch.
pub const BRANCH_SAMPLES: usize = 2048;
/// Refinement factor and half-width of the windows around kinks.
pub const KINK_REFINE: usize = 8;
pub const KINK_WINDOW: f64 = 0.05;
/// Bisection switches to Newton once `E - 1` exceeds this.
pub const NEWTON_MIN_EXCESS: f64 = 1e-3;

/// One inviscid solution, in the coordinates of the original problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSolution {
    pub regime: Regime,
    /// Maximum point the branch emanates from (trapped regime).
    pub anchor: Option<f64>,
    pub turning_point: Option<f64>,
    pub anchor_normalized: Option<f64>,
    pub turning_normalized: Option<f64>,
    /// Sorted sample points in `[0, 1)`.
    pub x: Vec<f64>,
    /// `w(x) - w(0)`
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InviscidResult {
    pub regime: Regime,
    /// `H0 / gamma` of the normalized problem.
    pub e0: f64,
    /// Effective Hamiltonian of the original problem.
    #[serde(rename = "H0")]
    pub h0: f64,
    /// Threshold for `|mu|`: `gamma mu*`.
    pub mu_star: f64,
    /// Threshold for `|mu / gamma|`.
    pub mu_star_normalized: f64,
    pub branches: Vec<BranchSolution>,
    /// `|int psi_E0 - r|` in the unique regime, zero otherwise.
    pub residual: f64,
}

fn psi(problem: &NormalizedProblem, e: f64, y: f64) -> f64 {
    let a = e - problem.flow.value(y);
    (a * a - 1.0).max(0.0).sqrt()
}

/// Maximum points of the normalized flow and their translates covering `[-1, 3]`.
fn break_points(problem: &NormalizedProblem) -> Vec<f64> {
    if problem.flow.constant {
        return Vec::new();
    }
    let m = locate_maxima(&problem.flow, MEMBERSHIP_TOL);
    let mut out = Vec::new();
    for k in -1..=2 {
        out.extend(m.points.iter().map(|p| p.x + k as f64));
    }
    out.sort_by(f64::total_cmp);
    out
}

fn maxima_normalized(problem: &NormalizedProblem) -> Result<Vec<f64>> {
    if problem.flow.constant {
        return Err(Error::InfiniteMaxima);
    }
    Ok(locate_maxima(&problem.flow, MEMBERSHIP_TOL).points.iter().map(|p| p.x).collect())
}

/// `mu* = int_0^1 sqrt((1 - v)^2 - 1)` of the normalized flow, i.e. the threshold for `|mu / gamma|`.
pub fn inviscid_threshold(problem: &NormalizedProblem, tol: f64) -> Result<f64> {
    if problem.flow.constant {
        return Ok(0.0);
    }
    let breaks = break_points(problem);
    quadrature::integrate_split(|y| psi(problem, 1.0, y), 0.0, 1.0, &breaks, tol)
}

/// `F(E) = int_0^1 sqrt((E - v)^2 - 1)`.
pub fn mean_speed(problem: &NormalizedProblem, e: f64, tol: f64) -> Result<f64> {
    let breaks = break_points(problem);
    quadrature::integrate_split(|y| psi(problem, e, y), 0.0, 1.0, &breaks, tol)
}

/// `F'(E) = int (E - v) / sqrt((E - v)^2 - 1)`, finite for `E > 1`.
fn mean_speed_derivative(problem: &NormalizedProblem, e: f64, tol: f64) -> Result<f64> {
    let breaks = break_points(problem);
    quadrature::integrate_split(
        |y| {
            let a = e - problem.flow.value(y);
            a / (a * a - 1.0).max(f64::MIN_POSITIVE).sqrt()
        },
        0.0,
        1.0,
        &breaks,
        tol,
    )
}

/// Effective Hamiltonian and regime; branches are left empty (see [`enumerate_solutions`]).
pub fn solve_inviscid_h(problem: &NormalizedProblem, tol: f64) -> Result<InviscidResult> {
    let r = problem.slope_ratio();
    let quad_tol = (tol * 1e-2).max(1e-15);
    let mu_star = inviscid_threshold(problem, quad_tol)?;
    let (regime, e0, residual) = if r < mu_star {
        (Regime::Trapped, 1.0, 0.0)
    } else if r == 0.0 {
        (Regime::Unique, 1.0, mu_star)
    } else {
        let f = |e: f64| mean_speed(problem, e, quad_tol).map(|v| v - r).unwrap_or(f64::NAN);
        let df = |e: f64| mean_speed_derivative(problem, e, quad_tol).unwrap_or(f64::NAN);
        let hi = (1.0 + r * r).sqrt();
        let e0 = if f(1.0) >= 0.0 {
            1.0
        } else {
            roots::safeguarded_newton(f, df, |e| e - 1.0 >= NEWTON_MIN_EXCESS, 1.0, hi, 1e-15)?
        };
        (Regime::Unique, e0, (mean_speed(problem, e0, quad_tol)? - r).abs())
    };
    Ok(InviscidResult {
        regime,
        e0,
        h0: problem.eigenvalue_to_h(e0),
        mu_star: problem.gamma * mu_star,
        mu_star_normalized: mu_star,
        branches: Vec::new(),
        residual,
    })
}

/// `x_mu` in `(x_i, x_i + 1)` with `int_{x_i}^{x_mu} psi_1 = (r + mu*) / 2`, normalized coordinates.
pub fn turning_point(problem: &NormalizedProblem, anchor: f64, tol: f64) -> Result<f64> {
    let r = problem.slope_ratio();
    let quad_tol = 1e-14;
    let mu_star = inviscid_threshold(problem, quad_tol)?;
    if r >= mu_star {
        return Err(Error::WrongRegime(format!(
            "no turning point: mu/gamma = {r} is not below the threshold {mu_star}"
        )));
    }
    if problem.flow.value(anchor).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("anchor {anchor} is not a maximum point")));
    }
    let breaks = break_points(problem);
    let half = 0.5 * (r + mu_star);
    let s = |x: f64| {
        quadrature::integrate_split(|y| psi(problem, 1.0, y), anchor, x, &breaks, quad_tol).unwrap_or(f64::NAN) - half
    };
    let x = roots::safeguarded_newton(s, |x| psi(problem, 1.0, x), |_| true, anchor, anchor + 1.0, tol.max(1e-15))?;
    Ok(x)
}

/// Branch data in normalized coordinates.
#[derive(Debug, Clone, Copy)]
struct Shape {
    e0: f64,
    anchor: f64,
    turning: Option<f64>,
}

/// `w(x) - w(0)` of the branch at original points `xs`.
fn profile(problem: &NormalizedProblem, shape: Shape, xs: &[f64]) -> Result<Vec<f64>> {
    let r = problem.slope_ratio();
    let breaks = break_points(problem);
    let to_norm = |x: f64| -> f64 {
        let y = if problem.reflected { (-x).rem_euclid(1.0) } else { x.rem_euclid(1.0) };
        if y >= 1.0 {
            0.0
        } else {
            y
        }
    };
    // normalized points s in [anchor, anchor + 1), plus s for y = 0
    let mut pts: Vec<(f64, usize)> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let y = to_norm(x);
            let s = if y >= shape.anchor { y } else { y + 1.0 };
            (s, i)
        })
        .collect();
    let zero_s = if shape.anchor > 0.0 { 1.0 } else { 0.0 };
    pts.push((zero_s, usize::MAX));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let f = |y: f64| psi(problem, shape.e0, y);
    let mut s_vals = vec![0.0; pts.len()];
    let mut acc = 0.0;
    let mut last = shape.anchor;
    for (k, (s, _)) in pts.iter().enumerate() {
        if *s > last {
            acc += quadrature::integrate_split(f, last, *s, &breaks, 1e-14)?;
            last = *s;
        }
        s_vals[k] = acc;
    }
    let s_turn = match shape.turning {
        Some(t) => quadrature::integrate_split(f, shape.anchor, t, &breaks, 1e-14)?,
        None => 0.0,
    };
    let u_of = |s: f64, sv: f64| -> f64 {
        match shape.turning {
            Some(t) if s > t => 2.0 * s_turn - sv,
            _ => sv,
        }
    };
    // w_n(y) / gamma = U(y) - r y with U(y) = U(s) - r when y = s - 1
    let w_scaled = |s: f64, sv: f64| -> f64 {
        let u = u_of(s, sv);
        if s >= 1.0 {
            (u - r) - r * (s - 1.0)
        } else {
            u - r * s
        }
    };
    let mut out = vec![0.0; xs.len()];
    let mut w0 = 0.0;
    for (k, (s, i)) in pts.iter().enumerate() {
        let val = problem.gamma * w_scaled(*s, s_vals[k]);
        if *i == usize::MAX {
            w0 = val;
        } else {
            out[*i] = val;
        }
    }
    out.iter_mut().for_each(|v| *v -= w0);
    Ok(out)
}

fn sample_points(kinks: &[f64]) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..BRANCH_SAMPLES).map(|j| j as f64 / BRANCH_SAMPLES as f64).collect();
    let fine = 1.0 / (BRANCH_SAMPLES * KINK_REFINE) as f64;
    let half = (KINK_WINDOW / fine).round() as i64;
    for &k in kinks {
        let base = (k / fine).round() as i64;
        for m in -half..=half {
            xs.push(((base + m) as f64 * fine).rem_euclid(1.0));
        }
    }
    xs.retain(|x| *x < 1.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    xs
}

fn build_branch(problem: &NormalizedProblem, shape: Shape, regime: Regime) -> Result<BranchSolution> {
    let kinks_norm: Vec<f64> = match shape.turning {
        Some(t) => vec![shape.anchor, t.rem_euclid(1.0)],
        None => Vec::new(),
    };
    let kinks: Vec<f64> = kinks_norm.iter().map(|&k| problem.point_to_original(k)).collect();
    let x = sample_points(&kinks);
    let w = profile(problem, shape, &x)?;
    Ok(BranchSolution {
        regime,
        anchor: shape.turning.map(|_| problem.point_to_original(shape.anchor)),
        turning_point: shape.turning.map(|t| problem.point_to_original(t.rem_euclid(1.0))),
        anchor_normalized: shape.turning.map(|_| shape.anchor),
        turning_normalized: shape.turning,
        x,
        w,
    })
}

/// [`solve_inviscid_h`] plus every solution branch: one per maximum point in the trapped
/// regime, the unique solution otherwise.
pub fn enumerate_solutions(problem: &NormalizedProblem, tol: f64) -> Result<InviscidResult> {
    let mut res = solve_inviscid_h(problem, tol)?;
    match res.regime {
        Regime::Unique => {
            res.branches.push(unique_branch(problem, tol)?);
        }
        Regime::Trapped => {
            let maxima = locate_maxima(&problem.flow, MEMBERSHIP_TOL);
            if !maxima.is_finite {
                return Err(Error::InfiniteMaxima);
            }
            for p in &maxima.points {
                res.branches.push(branch_at(problem, p.x, tol)?);
            }
        }
    }
    Ok(res)
}

/// Trapped branch anchored at the normalized maximum point `anchor`.
pub fn branch_at(problem: &NormalizedProblem, anchor: f64, tol: f64) -> Result<BranchSolution> {
    let t = turning_point(problem, anchor, tol)?;
    let shape = Shape {
        e0: 1.0,
        anchor,
        turning: Some(t),
    };
    build_branch(problem, shape, Regime::Trapped)
}

/// The unique-regime solution; errors in the trapped regime.
pub fn unique_branch(problem: &NormalizedProblem, tol: f64) -> Result<BranchSolution> {
    let res = solve_inviscid_h(problem, tol)?;
    if res.regime != Regime::Unique {
        return Err(Error::WrongRegime("the unique branch exists only for |mu| >= mu*".into()));
    }
    let shape = Shape {
        e0: res.e0,
        anchor: 0.0,
        turning: None,
    };
    build_branch(problem, shape, Regime::Unique)
}

/// `w(x) - w(0)` at arbitrary original points for the branch anchored at `anchor_normalized`
/// (trapped regime) or for the unique solution (`None`).
pub fn branch_values(problem: &NormalizedProblem, anchor_normalized: Option<f64>, xs: &[f64], tol: f64) -> Result<Vec<f64>> {
    let res = solve_inviscid_h(problem, tol)?;
    let shape = match (res.regime, anchor_normalized) {
        (Regime::Trapped, Some(a)) => Shape {
            e0: 1.0,
            anchor: a,
            turning: Some(turning_point(problem, a, tol)?),
        },
        (Regime::Trapped, None) => {
            return Err(Error::InvalidInput("trapped regime needs an anchor".into()));
        }
        (Regime::Unique, _) => Shape {
            e0: res.e0,
            anchor: 0.0,
            turning: None,
        },
    };
    profile(problem, shape, xs)
}

/// Sup of `|sqrt(gamma^2 + (mu + w')^2) + gamma v - H0|` in original variables, with `w'`
/// from fourth-order differences with step `1e-3`, over samples at least `3e-3` away from
/// maximum points of `v` and from the turning point.
pub fn branch_residual(problem: &NormalizedProblem, result: &InviscidResult, branch: &BranchSolution) -> Result<f64> {
    let delta = 1e-3;
    let p = problem.original;
    let flow = &problem.original_flow;
    let mut avoid: Vec<f64> = maxima_normalized(problem)
        .unwrap_or_default()
        .into_iter()
        .map(|x| problem.point_to_original(x))
        .collect();
    if let Some(t) = branch.turning_point {
        avoid.push(t);
    }
    let far = |x: f64| avoid.iter().all(|a| crate::flow::periodic_distance(*a, x) > 3.0 * delta);
    let xs: Vec<f64> = branch.x.iter().copied().filter(|x| far(*x)).step_by(4).collect();
    let mut probes = Vec::with_capacity(4 * xs.len());
    for &x in &xs {
        probes.extend([x - 2.0 * delta, x - delta, x + delta, x + 2.0 * delta]);
    }
    let shape = Shape {
        e0: result.e0,
        anchor: branch.anchor_normalized.unwrap_or(0.0),
        turning: branch.turning_normalized,
    };
    let vals = profile(problem, shape, &probes)?;
    let mut worst: f64 = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let v = &vals[4 * k..4 * k + 4];
        // w(x +- delta) wraps periodically, which is exact for a periodic w
        let dw = (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * delta);
        let res = (p.gamma.hypot(p.mu + dw) + p.gamma * flow.value(x) - result.h0).abs();
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Local structure of `u = mu x + w` along one sampled branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KinkAudit {
    /// Discrete local minima of `u` over one period.
    pub local_minima: Vec<f64>,
    /// Discrete local maxima of `u` over one period.
    pub local_maxima: Vec<f64>,
    /// Every local minimum lies within two sample spacings of the anchor.
    pub minima_at_anchor: bool,
    /// `u` has a corner with `u'` jumping from `+` to `-` at the turning point (a local max).
    pub turning_is_concave_corner: bool,
}

pub fn kink_audit(problem: &NormalizedProblem, branch: &BranchSolution) -> KinkAudit {
    let mu = problem.original.mu;
    let n = branch.x.len();
    let u: Vec<f64> = branch.x.iter().zip(&branch.w).map(|(x, w)| mu * x + w).collect();
    // u(x + 1) = u(x) + mu
    let at = |k: i64| -> f64 {
        let m = k.rem_euclid(n as i64) as usize;
        let shift = k.div_euclid(n as i64) as f64;
        u[m] + mu * shift
    };
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for k in 0..n as i64 {
        let (a, b, c) = (at(k - 1), at(k), at(k + 1));
        if b < a && b < c {
            minima.push(branch.x[k as usize]);
        }
        if b > a && b > c {
            maxima.push(branch.x[k as usize]);
        }
    }
    let spacing = 2.0 / BRANCH_SAMPLES as f64;
    let minima_at_anchor = match branch.anchor {
        Some(a) => minima.iter().all(|m| crate::flow::periodic_distance(*m, a) <= spacing),
        None => minima.is_empty() || mu == 0.0,
    };
    let turning_is_concave_corner = match branch.turning_point {
        Some(t) => {
            let k = branch
                .x
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    crate::flow::periodic_distance(*a.1, t).total_cmp(&crate::flow::periodic_distance(*b.1, t))
                })
                .map(|(k, _)| k as i64)
                .unwrap_or(0);
            let h = 1.0 / (BRANCH_SAMPLES * KINK_REFINE) as f64;
            let left = (at(k - 2) - at(k - 4)) / (2.0 * h);
            let right = (at(k + 4) - at(k + 2)) / (2.0 * h);
            left > 0.0 && right < 0.0
        }
        None => true,
    };
    KinkAudit {
        local_minima: minima,
        local_maxima: maxima,
        minima_at_anchor,
        turning_is_concave_corner,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{build_flow, normalize, FlowSpec, Momentum};

    fn problem(spec: FlowSpec, gamma: f64, mu: f64) -> NormalizedProblem {
        normalize(&build_flow(&spec).unwrap(), Momentum::new(gamma, mu)).unwrap()
    }

    #[test]
    fn constant_flow_threshold_is_zero() {
        let np = problem(FlowSpec::constant(0.0), 1.0, 0.7);
        assert_eq!(inviscid_threshold(&np, 1e-12).unwrap(), 0.0);
        let res = solve_inviscid_h(&np, 1e-12).unwrap();
        assert_eq!(res.regime, Regime::Unique);
        assert!((res.h0 - 1.0f64.hypot(0.7)).abs() < 1e-12);
    }

    #[test]
    fn trapped_single_well() {
        let np = problem(FlowSpec::preset("single-well").unwrap(), 1.0, 0.1);
        let res = enumerate_solutions(&np, 1e-12).unwrap();
        assert_eq!(res.regime, Regime::Trapped);
        assert_eq!(res.e0, 1.0);
        assert_eq!(res.branches.len(), 1);
        let b = &res.branches[0];
        assert!(branch_residual(&np, &res, b).unwrap() < 1e-8);
        let audit = kink_audit(&np, b);
        assert!(audit.minima_at_anchor, "{audit:?}");
        assert!(audit.turning_is_concave_corner);
    }

    #[test]
    fn symmetric_turning_point() {
        let np = problem(FlowSpec::preset("single-well").unwrap(), 1.0, 0.0);
        let t = turning_point(&np, 0.0, 1e-13).unwrap();
        assert!((t - 0.5).abs() < 1e-12, "{t}");
    }

    #[test]
    fn turning_point_rejected_in_unique_regime() {
        let np = problem(FlowSpec::preset("single-well").unwrap(), 1.0, 5.0);
        assert!(matches!(turning_point(&np, 0.0, 1e-12), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn unique_root_residual() {
        let base = problem(FlowSpec::preset("single-well").unwrap(), 1.0, 0.0);
        let ms = inviscid_threshold(&base, 1e-14).unwrap();
        let np = problem(FlowSpec::preset("single-well").unwrap(), 1.0, 2.0 * ms);
        let res = enumerate_solutions(&np, 1e-12).unwrap();
        assert_eq!(res.regime, Regime::Unique);
        assert!(res.residual <= 1e-10);
        assert!(res.e0 > 1.0);
        assert!(branch_residual(&np, &res, &res.branches[0]).unwrap() < 1e-8);
    }
}
