//! The inviscid fluctuation selected as `d -> 0+`: the branch anchored at the flattest
//! maximum `x_bar` of `v`, i.e. the maximum point minimizing `-v''`.

use serde::Serialize;

use crate::cell::{solve_cell_from, CellSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::flow::{locate_maxima, MaximaSet, NormalizedProblem, MEMBERSHIP_TOL};
use crate::inviscid::{self, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionFlags {
    pub maxima_finite: bool,
    pub curvatures_distinct: bool,
    pub nondegenerate: bool,
    pub trapped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub regime: Regime,
    /// Selected maximum point, original coordinates (`None` in the unique regime).
    pub x_bar: Option<f64>,
    /// `-sqrt(-v''(x_bar))`
    pub slope_target: Option<f64>,
    pub x_mu: Option<f64>,
    /// `H0` of the original problem.
    #[serde(rename = "H0")]
    pub h0: f64,
    pub x: Vec<f64>,
    /// `w0(x) - w0(0)`
    pub w0: Vec<f64>,
    pub assumptions: AssumptionFlags,
}

/// The maximum point with the smallest `-v''`, and `-sqrt(-v''(x_bar))`.
pub fn select_xbar(maxima: &MaximaSet) -> Result<(f64, f64)> {
    if !maxima.is_finite {
        return Err(Error::InfiniteMaxima);
    }
    if let Some(p) = maxima.points.iter().find(|p| !(p.neg_curvature > 0.0)) {
        return Err(Error::DegenerateMaximum {
            x: p.x,
            neg_curvature: p.neg_curvature,
        });
    }
    if maxima.degenerate {
        let p = maxima
            .points
            .iter()
            .min_by(|a, b| a.neg_curvature.total_cmp(&b.neg_curvature))
            .ok_or(Error::InfiniteMaxima)?;
        return Err(Error::DegenerateMaximum {
            x: p.x,
            neg_curvature: p.neg_curvature,
        });
    }
    if !maxima.curvatures_distinct {
        return Err(Error::SelectionIllPosed(format!(
            "maximum curvatures tie (relative gap {:e})",
            maxima.distinctness_margin.unwrap_or(0.0)
        )));
    }
    let p = maxima
        .points
        .iter()
        .min_by(|a, b| a.neg_curvature.total_cmp(&b.neg_curvature))
        .ok_or(Error::InfiniteMaxima)?;
    Ok((p.x, -p.neg_curvature.sqrt()))
}

fn flags(problem: &NormalizedProblem, maxima: &MaximaSet, regime: Regime) -> AssumptionFlags {
    AssumptionFlags {
        maxima_finite: maxima.is_finite,
        curvatures_distinct: maxima.curvatures_distinct,
        nondegenerate: !maxima.degenerate && !problem.flow.constant,
        trapped: regime == Regime::Trapped,
    }
}

/// The limit profile `w0 - w0(0)`: the branch anchored at `x_bar` in the trapped regime,
/// the unique solution otherwise.
pub fn physical_fluctuation(problem: &NormalizedProblem, tol: f64) -> Result<SelectionResult> {
    let inv = inviscid::solve_inviscid_h(problem, tol)?;
    let maxima = locate_maxima(&problem.flow, MEMBERSHIP_TOL);
    let assumptions = flags(problem, &maxima, inv.regime);
    match inv.regime {
        Regime::Unique => {
            let b = inviscid::unique_branch(problem, tol)?;
            Ok(SelectionResult {
                regime: Regime::Unique,
                x_bar: None,
                slope_target: None,
                x_mu: None,
                h0: inv.h0,
                x: b.x,
                w0: b.w,
                assumptions,
            })
        }
        Regime::Trapped => {
            let (xbar, slope) = select_xbar(&maxima)?;
            let b = inviscid::branch_at(problem, xbar, tol)?;
            Ok(SelectionResult {
                regime: Regime::Trapped,
                x_bar: b.anchor,
                slope_target: Some(slope),
                x_mu: b.turning_point,
                h0: inv.h0,
                x: b.x,
                w0: b.w,
                assumptions,
            })
        }
    }
}

/// Selected anchor in normalized coordinates, `None` in the unique regime.
fn selected_anchor(problem: &NormalizedProblem, tol: f64) -> Result<Option<f64>> {
    let inv = inviscid::solve_inviscid_h(problem, tol)?;
    match inv.regime {
        Regime::Unique => Ok(None),
        Regime::Trapped => Ok(Some(select_xbar(&locate_maxima(&problem.flow, MEMBERSHIP_TOL))?.0)),
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// `max_j |w_d(x_j) - (w0(x_j) - w0(0))|` for a solved cell problem.
pub fn selection_distance(problem: &NormalizedProblem, sol: &CellSolution, tol: f64) -> Result<f64> {
    let anchor = selected_anchor(problem, tol)?;
    let w0 = inviscid::branch_values(problem, anchor, &sol.grid(), tol)?;
    Ok(sup_distance(&sol.w, &w0))
}

/// Solves at `d` and returns the sup distance to the selected inviscid profile.
pub fn verify_selection(problem: &NormalizedProblem, d: f64, opts: &SolverOptions, tol: f64) -> Result<f64> {
    let sol = solve_cell_from(problem, d, opts, None)?;
    selection_distance(problem, &sol, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionStudy {
    pub selection: SelectionResult,
    /// Decreasing.
    pub d_values: Vec<f64>,
    pub distances: Vec<f64>,
    /// Smallest distance to a branch anchored at any other maximum, per `d`.
    pub wrong_anchor_distances: Vec<Option<f64>>,
    pub monotone: bool,
    /// Grid, `w_d` and `w0 - w0(0)` at the smallest `d`.
    #[serde(skip)]
    pub comparison: Vec<(f64, f64, f64)>,
}

impl SelectionStudy {
    pub fn comparison_csv(&self) -> String {
        let mut out = String::from("x,w_d,w0\n");
        for (x, a, b) in &self.comparison {
            out.push_str(&format!("{x:.17e},{a:.17e},{b:.17e}\n"));
        }
        out
    }
}

/// Distances to the selected and to every competing branch along a decreasing `d` schedule,
/// reusing each solution as the next continuation start.
pub fn selection_study(
    problem: &NormalizedProblem,
    d_values: &[f64],
    opts: &SolverOptions,
    tol: f64,
) -> Result<SelectionStudy> {
    let selection = physical_fluctuation(problem, tol)?;
    let anchor = selected_anchor(problem, tol)?;
    let others: Vec<f64> = match anchor {
        Some(a) => locate_maxima(&problem.flow, MEMBERSHIP_TOL)
            .points
            .iter()
            .map(|p| p.x)
            .filter(|x| (x - a).abs() > 1e-9)
            .collect(),
        None => Vec::new(),
    };
    let mut ds = d_values.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let mut prev: Option<CellSolution> = None;
    let mut distances = Vec::new();
    let mut wrong = Vec::new();
    let mut comparison = Vec::new();
    for &d in &ds {
        let sol = solve_cell_from(problem, d, opts, prev.as_ref())?;
        let grid = sol.grid();
        let w0 = inviscid::branch_values(problem, anchor, &grid, tol)?;
        distances.push(sup_distance(&sol.w, &w0));
        let mut best: Option<f64> = None;
        for &o in &others {
            let wo = inviscid::branch_values(problem, Some(o), &grid, tol)?;
            let dist = sup_distance(&sol.w, &wo);
            best = Some(best.map_or(dist, |b: f64| b.min(dist)));
        }
        wrong.push(best);
        comparison = grid.iter().zip(&sol.w).zip(&w0).map(|((x, a), b)| (*x, *a, *b)).collect();
        prev = Some(sol);
    }
    let monotone = distances.windows(2).all(|w| w[1] < w[0]);
    Ok(SelectionStudy {
        selection,
        d_values: ds,
        distances,
        wrong_anchor_distances: wrong,
        monotone,
        comparison,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeDiagnostic {
    /// Decreasing.
    pub d_values: Vec<f64>,
    /// `E(d)` of the normalized problem.
    pub e_values: Vec<f64>,
    /// `(E(d) - 1) / d`
    pub slopes: Vec<f64>,
    /// Two-point extrapolation on the two smallest `d`, assuming an `O(d)` correction.
    pub extrapolated: f64,
    pub slope_target: Option<f64>,
    /// `|extrapolated / target - 1|`
    pub relative_error: Option<f64>,
}

/// `(E(d) - 1) / d` along `d_values` (at least two), with the extrapolated limit.
pub fn slope_diagnostic(
    problem: &NormalizedProblem,
    d_values: &[f64],
    opts: &SolverOptions,
    tol: f64,
) -> Result<SlopeDiagnostic> {
    if d_values.len() < 2 {
        return Err(Error::InvalidInput("slope diagnostic needs at least two values of d".into()));
    }
    let mut ds = d_values.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let mut prev: Option<CellSolution> = None;
    let mut e_values = Vec::new();
    for &d in &ds {
        let sol = solve_cell_from(problem, d, opts, prev.as_ref())?;
        e_values.push(sol.e);
        prev = Some(sol);
    }
    let slopes: Vec<f64> = ds.iter().zip(&e_values).map(|(d, e)| (e - 1.0) / d).collect();
    let k = ds.len();
    let (d1, d2) = (ds[k - 2], ds[k - 1]);
    let (s1, s2) = (slopes[k - 2], slopes[k - 1]);
    let extrapolated = (d1 * s2 - d2 * s1) / (d1 - d2);
    let slope_target = match selected_anchor(problem, tol) {
        Ok(Some(_)) => Some(select_xbar(&locate_maxima(&problem.flow, MEMBERSHIP_TOL))?.1),
        _ => None,
    };
    Ok(SlopeDiagnostic {
        d_values: ds,
        e_values,
        slopes,
        extrapolated,
        relative_error: slope_target.map(|t| (extrapolated / t - 1.0).abs()),
        slope_target,
    })
}
