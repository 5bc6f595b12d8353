use thiserror::Error;

/// Failures shared across the solver and oracle modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The energy does not bracket a pair of turning points around the seed:
    /// the motion is unbounded or the energy lies below the potential.
    #[error("no oscillation: energy does not bracket two turning points")]
    NoOscillation,

    /// Successive quadrature refinements never agreed to the requested
    /// tolerance within the doubling budget.
    #[error("quadrature did not converge: residual {residual:.3e} after {doublings} doublings (tolerance {tolerance:.1e})")]
    NoConvergence {
        residual: f64,
        tolerance: f64,
        doublings: u32,
    },

    /// E - V(x) could not be written as (x_plus - x)(x - x_minus) g(x) with
    /// g > 0 on the oscillation interval; extra turning points lie inside.
    #[error("factorization failed: E - V changes sign inside the oscillation interval")]
    FactorizationFailure,

    /// The expansion ratio reached |delta| >= 1 somewhere on the interval,
    /// so the geometric-style resummation diverges.
    #[error("series diverges: sampled max |delta| = {max_abs_delta:.6} >= 1")]
    ConvergenceViolation { max_abs_delta: f64 },

    /// The scanned bracket contains no sign change of dT/d(lambda).
    #[error("no stationary point of the truncated period in the scanned bracket")]
    NoStationaryPoint,

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested step size is too small to advance time reliably.
    #[error("step underflow: h = {step:.3e} is below 1e-15")]
    StepUnderflow { step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
