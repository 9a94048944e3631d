use thiserror::Error;

/// Errors shared across the solver, lattice and diagnostic modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("field period k must be at least 3, got {0}")]
    InvalidK(usize),

    #[error("field values must all be finite")]
    NonFiniteField,

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("operation requires {expected} parameters, got {found}")]
    InvalidRegime { expected: &'static str, found: &'static str },

    #[error("operation is undefined on the zero field")]
    ZeroField,

    #[error("both nonlinear sums vanish; the fibering map has no positive root")]
    DegenerateNonlinearity,

    #[error("no convergence after {iterations} iterations (best residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Newton Jacobian is singular at the current iterate")]
    SingularJacobian,

    #[error("state became non-finite during time integration at t = {0}")]
    NonFinite(f64),

    #[error("staggering requires an even period, got k = {0}")]
    OddPeriod(usize),

    #[error("window half-width {l} too large for period k = {k} (need 2L+1 <= k)")]
    WindowTooLarge { l: usize, k: usize },

    #[error("p-norm exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
