//! Shared fixtures for the benchmarks.

use flamespeed_core::{build_flow, normalize, FlowSpec, Momentum, NormalizedProblem};

/// Normalized problem for a preset flow at `p = (1, mu)`.
pub fn preset_problem(name: &str, mu: f64) -> NormalizedProblem {
    let flow = build_flow(&FlowSpec::preset(name).expect("preset")).expect("flow");
    normalize(&flow, Momentum::new(1.0, mu)).expect("normalize")
}
