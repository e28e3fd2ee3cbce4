use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("gamma = 0 has no normalized form (H = |mu| is returned by the degenerate path)")]
    DegenerateDirection,

    #[error("Newton iteration did not converge at d = {d}: residual {residual:e} after {iterations} iterations")]
    NoConvergence {
        d: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("singular linear system in Newton step")]
    SingularJacobian,

    #[error("degenerate maximum at x = {x}: -v''(x) = {neg_curvature:e}")]
    DegenerateMaximum { x: f64, neg_curvature: f64 },

    #[error("maximum set of the flow is not finite")]
    InfiniteMaxima,

    #[error("selection ill-posed: {0}")]
    SelectionIllPosed(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("weight constraint violated: {0}")]
    Constraint(String),

    #[error("singular expansion term at k = {k:?}")]
    SingularTerm { k: Vec<i64> },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
