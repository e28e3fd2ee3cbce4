mod common;

use common::oracle::Shooter;
use flamespeed_core::hj::{self, Quadratic};
use flamespeed_core::*;

fn single_well(mu: f64) -> NormalizedProblem {
    let flow = build_flow(&FlowSpec::preset("single-well").unwrap()).unwrap();
    normalize(&flow, Momentum::new(1.0, mu)).unwrap()
}

fn curvature_oracle(problem: &NormalizedProblem, d: f64) -> f64 {
    let spec = problem.flow.spec.clone();
    let shooter = Shooter {
        rhs: move |x: f64, phi: f64, e: f64| {
            let q = 1.0 + phi * phi;
            (q.sqrt() + spec.eval(x).0 - e) * q / d
        },
        steps: 4000,
        bound: 6.0,
    };
    shooter.eigenvalue(problem.slope_ratio(), 0.0, 3.0, true, 60).0
}

#[test]
fn curvature_matches_shooting_both_schemes() {
    let problem = single_well(0.1);
    let reference = curvature_oracle(&problem, 1.0);
    assert!((reference - 0.01139997201625).abs() < 1e-10, "oracle drifted: {reference}");
    for opts in [
        SolverOptions::default().with_scheme(Scheme::Spectral).with_grid(128),
        SolverOptions::default().with_scheme(Scheme::FiniteDifference).with_grid(1024),
    ] {
        let e = solve_cell(&problem, 1.0, &opts).unwrap().e;
        assert!((e - reference).abs() < 1e-9, "{:?}: {e} vs {reference}", opts.scheme);
    }
}

#[test]
fn curvature_matches_shooting_at_larger_slope() {
    let problem = single_well(0.6);
    let reference = curvature_oracle(&problem, 2.0);
    let e = solve_cell(&problem, 2.0, &SolverOptions::default()).unwrap().e;
    assert!((e - reference).abs() < 1e-9, "{e} vs {reference}");
}

#[test]
fn viscous_hj_matches_shooting() {
    let g = build_flow(&FlowSpec::new(vec![1.0], vec![], 0.0)).unwrap();
    let (p, d) = (0.3, 1.0);
    let spec = g.spec.clone();
    let shooter = Shooter {
        rhs: move |x: f64, u: f64, h: f64| (0.5 * u * u + spec.eval(x).0 - h) / d,
        steps: 4000,
        bound: 6.0,
    };
    let (reference, _) = shooter.eigenvalue(p, 0.0, 2.0, true, 60);
    let sol = hj::solve_viscous_hj(&g, &Quadratic, p, d, &SolverOptions::default()).unwrap();
    assert!((sol.h_bar - reference).abs() < 1e-9, "{} vs {reference}", sol.h_bar);
}
