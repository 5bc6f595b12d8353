//! Analytic and numerical solutions of conservative anharmonic oscillators.
//!
//! The centerpiece is a variational resummation of the energy-integral for
//! the period: the potential is split through a solvable quadratic reference
//! V0(x) = (1+lambda^2) x^2/2, the remainder is expanded in a bookkeeping
//! parameter, and the free parameter lambda is fixed by demanding the
//! truncated result be stationary (principle of minimal sensitivity). At
//! first order this yields closed forms for the Duffing oscillator: period,
//! trajectory, and Fourier coefficients, uniformly accurate in mu A^2.
//!
//! Three independent oracles validate every claim: direct quadrature of the
//! energy integral ([`quadrature`]), the exact Jacobi-elliptic solution
//! ([`exact`]), and a Runge-Kutta integration of the equation of motion
//! ([`ode`]).

// Reference constants keep every digit of their source printing, even where
// the trailing digits exceed f64 resolution.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod exact;
pub mod fourier;
pub mod lde;
pub mod ode;
pub mod potential;
pub mod quadrature;

pub use error::{Error, Result};
pub use exact::{
    asymptotic_c0_ratio, cn_fourier, duffing_exact_period, duffing_exact_solution, elliptic_k,
    harmonic_ratio, jacobi_cn, nome, EllipticParameters,
};
pub use fourier::{
    closed_form_small_z_expansion, duffing_pms_coefficient_numeric,
    duffing_pms_coefficients_closed, lp_coefficients, small_mu_series, synthesize,
    FourierSpectrum, SeriesCoefficient, XiSeries,
};
pub use lde::{
    delta_ratio, duffing_lambda_pms, duffing_period_pms, duffing_position_of_time,
    duffing_time_of_position, period_series, pms_lambda, InterpolatingPotential, LdeExpansion,
    PeriodResult,
};
pub use ode::{energy_drift, integrate, Trajectory};
pub use potential::{turning_points, OscillatorProblem, PolynomialPotential, TurningPoints};
pub use quadrature::{endpoint_singular_integral, period_oracle, time_oracle, QuadratureSpec};
