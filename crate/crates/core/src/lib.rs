//! Turbulent flame speeds of the curvature G-equation in periodic shear flows.

pub mod banded;
pub mod cell;
pub mod collocation;
pub mod error;
pub mod flow;
pub mod hj;
pub mod inequalities;
pub mod inviscid;
pub mod perturbation;
pub mod quadrature;
pub mod roots;
pub mod selection;
pub mod spectral;

pub use cell::{
    alpha_from_formula, flame_speed, mean_identity_check, solve_cell, solve_cell_from, sweep_markstein, CellSolution,
    FlameSpeed, SolverOptions, SweepResult,
};
pub use collocation::Scheme;
pub use error::{Error, Result};
pub use flow::{
    build_flow, locate_maxima, normalize, periodic_distance, FlowProfile, FlowSpec, MaxPoint, MaximaSet, Momentum,
    NormalizedProblem, MEMBERSHIP_TOL,
};
pub use inviscid::{BranchSolution, InviscidResult, Regime};
pub use selection::{SelectionResult, SelectionStudy};
