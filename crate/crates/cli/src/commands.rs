use std::fmt::Write as _;

use flamespeed_core::hj;
use flamespeed_core::inequalities::{self, SuiteReport};
use flamespeed_core::inviscid::{self, InviscidResult};
use flamespeed_core::perturbation::{self, Alpha2Form, DiophantineReport, PerturbationResult, ShearCrossCheck, VectorFieldFourier};
use flamespeed_core::selection::{self, SlopeDiagnostic};
use flamespeed_core::{
    build_flow, flame_speed, mean_identity_check, normalize, sweep_markstein, FlameSpeed, FlowSpec, Momentum,
    SelectionStudy, SweepResult,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{json, text, OutFile};
use crate::{Failure, EXIT_COUNTEREXAMPLE};

pub struct Summary {
    pub message: String,
    /// Exit code to report after the files are written.
    pub failed: Option<u8>,
    pub failure_note: String,
}

impl Summary {
    fn ok(message: String) -> Summary {
        Summary {
            message,
            failed: None,
            failure_note: String::new(),
        }
    }
}

type Outcome = Result<(Vec<OutFile>, Summary), Failure>;

#[derive(Serialize)]
struct SolveReport<'a> {
    command: &'static str,
    flow: &'a FlowSpec,
    momentum: Momentum,
    d: f64,
    identity_residual: Option<f64>,
    solution: &'a FlameSpeed,
}

pub fn solve(cfg: &RunConfig) -> Outcome {
    let spec = cfg.flow_spec();
    let flow = build_flow(&spec)?;
    let p = cfg.momentum();
    let d = cfg.d();
    let fs = flame_speed(&flow, p, d, &cfg.solver())?;
    let mut csv = String::new();
    let identity = match &fs {
        FlameSpeed::Degenerate { w, grid_n, .. } => {
            csv.push_str("x,w\n");
            for (j, w) in w.iter().enumerate() {
                let _ = writeln!(csv, "{:.17e},{w:.17e}", j as f64 / *grid_n as f64);
            }
            None
        }
        FlameSpeed::Cell(sol) => {
            csv.push_str("x,phi,w\n");
            for (j, (phi, w)) in sol.phi_original.iter().zip(&sol.w).enumerate() {
                let _ = writeln!(csv, "{:.17e},{phi:.17e},{w:.17e}", j as f64 / sol.grid_n as f64);
            }
            Some(mean_identity_check(sol, &normalize(&flow, p)?))
        }
    };
    let report = SolveReport {
        command: "solve",
        flow: &spec,
        momentum: p,
        d,
        identity_residual: identity,
        solution: &fs,
    };
    let msg = format!("H = {:.15} (p = ({}, {}), d = {d})", fs.h(), p.gamma, p.mu);
    Ok((vec![json("solve.json", &report)?, text("solve.csv", csv)], Summary::ok(msg)))
}

#[derive(Serialize)]
struct SweepReport<'a> {
    command: &'static str,
    flow: &'a FlowSpec,
    momentum: Momentum,
    /// `|p| + gamma int v`, the large-`d` limit.
    large_d_limit: f64,
    /// Inviscid `H0`, the small-`d` limit.
    inviscid: Option<InviscidResult>,
    sweep: &'a SweepResult,
    relative_mismatch: Vec<f64>,
    verdict: Verdict,
}

#[derive(Serialize)]
struct Verdict {
    strictly_decreasing: bool,
    derivatives_negative: bool,
}

pub fn sweep(cfg: &RunConfig) -> Outcome {
    let spec = cfg.flow_spec();
    let flow = build_flow(&spec)?;
    let p = cfg.momentum();
    if p.gamma == 0.0 {
        return Err(Failure::config("sweep needs gamma != 0 (H = |mu| for every d when gamma = 0)"));
    }
    let problem = normalize(&flow, p)?;
    let sw = sweep_markstein(&problem, &cfg.sweep_schedule(), &cfg.solver())?;
    let large = p.norm() + p.gamma * flow.mean;
    let inv = inviscid::solve_inviscid_h(&problem, 1e-12).ok();
    let h0 = inv.as_ref().map(|r| r.h0);
    let mut csv = String::from("d,H,E,dH_dd_fd,dE_dd_formula,residual,grid_n,H_large_d,H_inviscid\n");
    for i in 0..sw.d_values.len() {
        let _ = writeln!(
            csv,
            "{:e},{:.17e},{:.17e},{:.17e},{:.17e},{:e},{},{:.17e},{}",
            sw.d_values[i],
            sw.h_values[i],
            sw.e_values[i],
            sw.dh_dd_fd[i],
            sw.de_dd_formula[i],
            sw.residuals[i],
            sw.grid_n[i],
            large,
            h0.map_or(String::new(), |h| format!("{h:.17e}")),
        );
    }
    let _ = writeln!(
        csv,
        "# verdict: strictly_decreasing={} derivatives_negative={}",
        sw.strictly_decreasing, sw.derivatives_negative
    );
    let report = SweepReport {
        command: "sweep",
        flow: &spec,
        momentum: p,
        large_d_limit: large,
        inviscid: inv,
        sweep: &sw,
        relative_mismatch: sw.relative_mismatch(),
        verdict: Verdict {
            strictly_decreasing: sw.strictly_decreasing,
            derivatives_negative: sw.derivatives_negative,
        },
    };
    let msg = format!(
        "{} values of d: strictly decreasing = {}, derivatives negative = {}",
        sw.d_values.len(),
        sw.strictly_decreasing,
        sw.derivatives_negative
    );
    Ok((vec![json("sweep.json", &report)?, text("sweep.csv", csv)], Summary::ok(msg)))
}

#[derive(Serialize)]
struct SelectReport<'a> {
    command: &'static str,
    flow: &'a FlowSpec,
    momentum: Momentum,
    study: &'a SelectionStudy,
    slope: &'a SlopeDiagnostic,
}

pub fn select(cfg: &RunConfig) -> Outcome {
    let spec = cfg.flow_spec();
    let flow = build_flow(&spec)?;
    let p = cfg.momentum();
    if p.gamma == 0.0 {
        return Err(Failure::config("select needs gamma != 0"));
    }
    let problem = normalize(&flow, p)?;
    let tol = cfg.select_tol();
    // refusals surface before any solve
    selection::physical_fluctuation(&problem, tol)?;
    let opts = cfg.solver();
    let study = selection::selection_study(&problem, &cfg.select_schedule(), &opts, tol)?;
    let slope = selection::slope_diagnostic(&problem, &cfg.slope_schedule(), &opts, tol)?;
    let mut branch = String::from("x,w0\n");
    for (x, w) in study.selection.x.iter().zip(&study.selection.w0) {
        let _ = writeln!(branch, "{x:.17e},{w:.17e}");
    }
    let report = SelectReport {
        command: "select",
        flow: &spec,
        momentum: p,
        study: &study,
        slope: &slope,
    };
    let msg = format!(
        "x_bar = {}, distance at d = {:e}: {:.3e}, slope limit {:.4} (target {})",
        study.selection.x_bar.map_or("none (unique regime)".into(), |x| format!("{x:.6}")),
        study.d_values.last().copied().unwrap_or(f64::NAN),
        study.distances.last().copied().unwrap_or(f64::NAN),
        slope.extrapolated,
        slope.slope_target.map_or("none".into(), |t| format!("{t:.4}")),
    );
    Ok((
        vec![
            json("select.json", &report)?,
            text("comparison.csv", study.comparison_csv()),
            text("branch.csv", branch),
        ],
        Summary::ok(msg),
    ))
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let suite = cfg.suite();
    let report: SuiteReport = inequalities::run_suite(&suite);
    let msg = format!(
        "{} cases (seed {}): {} failures, min margin {:.3e}",
        report.cases_run,
        report.seed,
        report.failures.len(),
        report.min_margin
    );
    let mut summary = Summary::ok(msg);
    if !report.pass {
        summary.failed = Some(EXIT_COUNTEREXAMPLE);
        summary.failure_note = format!("{} counterexample(s); seeds are in inequalities.json", report.failures.len());
    }
    Ok((vec![json("inequalities.json", &report)?], summary))
}

#[derive(Serialize)]
struct PerturbReport {
    command: &'static str,
    dimension: usize,
    direction: Vec<f64>,
    /// `|p|` before normalization; `H` scales with it.
    scale: f64,
    d: f64,
    delta: f64,
    alpha1: f64,
    alpha2: f64,
    #[serde(rename = "H_approx")]
    h_approx: f64,
    margin: f64,
    expansion: PerturbationResult,
    diophantine: DiophantineReport,
    cross_check: Vec<ShearCrossCheck>,
    remainder_orders: Vec<f64>,
}

pub fn perturb(cfg: &RunConfig) -> Outcome {
    let pc = &cfg.perturb;
    let (field, shear) = match cfg.field_path() {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            (VectorFieldFourier::parse(&text)?, None)
        }
        None => {
            let spec = cfg.flow_spec();
            (VectorFieldFourier::from_shear(&spec)?, Some(spec))
        }
    };
    let raw = match &pc.direction {
        Some(v) => v.clone(),
        None if field.dimension == 2 => {
            let m = cfg.momentum();
            vec![m.gamma, m.mu]
        }
        None => return Err(Failure::config("perturb.direction is required for fields of dimension other than 2")),
    };
    let scale = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(scale > 0.0 && scale.is_finite()) || raw.len() != field.dimension {
        return Err(Failure::config(format!(
            "perturb.direction must be a nonzero vector with {} components",
            field.dimension
        )));
    }
    let unit: Vec<f64> = raw.iter().map(|x| x / scale).collect();
    let d = pc.d.unwrap_or_else(|| cfg.d());
    let delta = pc.delta.unwrap_or(0.01);
    let form = pc.form.unwrap_or(Alpha2Form::Corrected);
    let k = cfg.truncation();
    let exp = perturbation::effective_speed_expansion(&field, &unit, d, delta, k, form)?;
    let beta = pc.beta.unwrap_or(field.dimension as f64);
    let dio = perturbation::diophantine_check(&unit, k.min(64), beta, pc.c.unwrap_or(1e-3))?;
    let mut cross = Vec::new();
    if !pc.cross_check.is_empty() {
        let Some(spec) = &shear else {
            return Err(Failure::config("perturb.cross_check needs a shear flow, not a field file"));
        };
        let mut deltas = pc.cross_check.clone();
        deltas.sort_by(|a, b| b.total_cmp(a));
        let p = Momentum::new(raw[0], raw[1]);
        for &dl in &deltas {
            cross.push(perturbation::cross_check_shear(spec, p, d, dl, &cfg.solver(), form)?);
        }
    }
    let orders: Vec<f64> = cross.windows(2).map(|w| perturbation::remainder_order(&w[0], &w[1])).collect();
    let report = PerturbReport {
        command: "perturb",
        dimension: field.dimension,
        direction: unit,
        scale,
        d,
        delta,
        alpha1: exp.alpha1,
        alpha2: exp.alpha2,
        h_approx: scale * exp.h_approx,
        margin: exp.diophantine_margin,
        diophantine: dio,
        cross_check: cross,
        remainder_orders: orders.clone(),
        expansion: exp,
    };
    let mut msg = format!(
        "alpha1 = {:.6e}, alpha2 = {:.6e}, H_approx = {:.12}",
        report.alpha1, report.alpha2, report.h_approx
    );
    if !orders.is_empty() {
        let _ = write!(msg, ", remainder orders {orders:.2?}");
    }
    Ok((vec![json("perturb.json", &report)?], Summary::ok(msg)))
}

pub fn hj(cfg: &RunConfig) -> Outcome {
    let ham = cfg.hamiltonian()?;
    let g = build_flow(&cfg.potential()?)?;
    let p = cfg.hj.p.unwrap_or(0.3);
    let ds = cfg.hj.d_schedule.clone().unwrap_or_else(|| vec![2.0, 1.0, 0.5]);
    let sw = hj::hj_sweep(&g, ham.as_ref(), p, &ds, &cfg.solver())?;
    let msg = format!(
        "{} Hamiltonian, p = {p}: Hbar = {:.6?}, strictly decreasing in d = {}",
        sw.hamiltonian, sw.h_values, sw.strictly_decreasing_in_d
    );
    Ok((vec![json("hj.json", &sw)?], Summary::ok(msg)))
}
