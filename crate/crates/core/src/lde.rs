//! Delta expansion of the period and trajectory around a tunable quadratic
//! well, with stationarity-based selection of the interpolation parameter.
//!
//! The period integral for E - V is rewritten against the reference well
//! V0(x) = (1 + lambda^2) x^2 / 2 whose turning points are pinned to the true
//! ones, then expanded in the ratio Delta = (E - E0 - V + V0)/(E0 - V0).
//! Truncating at a finite order leaves an artificial lambda dependence; the
//! parameter is fixed by demanding the truncated period be stationary in
//! lambda. For the cubic-force oscillator the first-order optimum is
//! lambda = sqrt(3 mu) A / 2 and everything downstream of it has a closed
//! form, which this module also provides.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::{OscillatorProblem, TurningPoints};
use crate::quadrature::{chebyshev_angle_sum, deflate, horner, refine, QuadratureSpec};

/// The reference well V0(x) = (1 + lambda^2) x^2 / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolatingPotential {
    lambda: f64,
}

impl InterpolatingPotential {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "interpolation parameter lambda = {lambda} must be finite and nonnegative"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Curvature 1 + lambda^2 of the reference well.
    pub fn stiffness(&self) -> f64 {
        1.0 + self.lambda * self.lambda
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        0.5 * self.stiffness() * x * x
    }

    /// Reference energy E0 = V0(x_plus), which makes the reference well turn
    /// exactly where the true motion does.
    pub fn reference_energy(&self, x_plus: f64) -> f64 {
        self.evaluate(x_plus)
    }
}

/// Per-order contributions to the expanded period, evaluated at unit
/// bookkeeping parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LdeExpansion {
    lambda: f64,
    order: u32,
    delta: f64,
    terms: Vec<f64>,
}

impl LdeExpansion {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Bookkeeping expansion parameter; the physical series is read at 1.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Contribution of each order, prefactors included; length is order + 1.
    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    /// Partial sum of the series, i.e. the approximate period.
    pub fn total(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// A period approximation together with the parameter that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodResult {
    pub period: f64,
    pub frequency: f64,
    pub lambda_used: f64,
    pub order: u32,
}

impl PeriodResult {
    /// Builds the record from a period; the frequency is derived as 2 pi / T
    /// so the pair satisfies T * Omega = 2 pi by construction.
    pub fn new(period: f64, lambda_used: f64, order: u32) -> Result<Self> {
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::Domain(format!(
                "period {period} must be finite and positive"
            )));
        }
        Ok(Self {
            period,
            frequency: 2.0 * PI / period,
            lambda_used,
            order,
        })
    }
}

/// Numerator and denominator of Delta with the shared turning-point roots
/// divided out, so the ratio is finite on the closed oscillation interval.
fn delta_polynomials(
    problem: &OscillatorProblem,
    interp: &InterpolatingPotential,
) -> Result<(Vec<f64>, Vec<f64>, TurningPoints)> {
    let tp = problem.turning_points()?;
    let energy = problem.energy_at_rest();
    let stiffness = interp.stiffness();
    let reference_energy = interp.reference_energy(tp.x_plus);

    let coefficients = problem.potential().coefficients();
    let mut numerator = vec![0.0; coefficients.len().max(3)];
    for (k, &c) in coefficients.iter().enumerate() {
        numerator[k] -= c;
    }
    numerator[0] += energy - reference_energy;
    numerator[2] += 0.5 * stiffness;
    let mut denominator = vec![reference_energy, 0.0, -0.5 * stiffness];

    numerator = deflate(&numerator, tp.x_plus);
    denominator = deflate(&denominator, tp.x_plus);
    if problem.potential().is_even() {
        numerator = deflate(&numerator, tp.x_minus);
        denominator = deflate(&denominator, tp.x_minus);
    }
    Ok((numerator, denominator, tp))
}

/// The expansion ratio Delta(x) = (E - E0 - V(x) + V0(x))/(E0 - V0(x)),
/// evaluated in the algebraically reduced form that stays finite at the
/// turning points.
pub fn delta_ratio(
    problem: &OscillatorProblem,
    interp: &InterpolatingPotential,
    x: f64,
) -> Result<f64> {
    let (numerator, denominator, tp) = delta_polynomials(problem, interp)?;
    let slack = 1e-12 * (tp.x_plus - tp.x_minus);
    if x < tp.x_minus - slack || x > tp.x_plus + slack {
        return Err(Error::Domain(format!(
            "x = {x} outside the oscillation interval [{}, {}]",
            tp.x_minus, tp.x_plus
        )));
    }
    Ok(horner(&numerator, x) / horner(&denominator, x))
}

const DELTA_SAMPLE_PANELS: usize = 128;

/// Expands the period in the interpolation ratio up to the given order.
///
/// Term n is (2n-1)!!/(n! 2^n) (-1)^n times the arcsine-weighted integral of
/// sqrt(2m/g0) Delta^n, where E0 - V0 = (x_plus - x)(x - x_minus) g0. The
/// factorization requires a symmetric well, so the potential must be even.
/// Before integrating, |Delta| is sampled across the interval; the expansion
/// is refused when the sampled maximum reaches 1 since the underlying
/// geometric series no longer converges.
pub fn period_series(
    problem: &OscillatorProblem,
    interp: &InterpolatingPotential,
    order: u32,
    spec: &QuadratureSpec,
) -> Result<LdeExpansion> {
    spec.validate()?;
    if !problem.potential().is_even() {
        return Err(Error::Domain(
            "period expansion needs an even potential: the symmetric reference well \
             cannot share both turning points with an asymmetric one"
                .into(),
        ));
    }
    let (numerator, denominator, tp) = delta_polynomials(problem, interp)?;
    let delta = |x: f64| horner(&numerator, x) / horner(&denominator, x);

    let center = tp.midpoint();
    let radius = tp.half_width();
    let mut max_abs_delta = 0.0_f64;
    for k in 0..=DELTA_SAMPLE_PANELS {
        let x = center + radius * (k as f64 * PI / DELTA_SAMPLE_PANELS as f64).cos();
        max_abs_delta = max_abs_delta.max(delta(x).abs());
    }
    if max_abs_delta >= 1.0 {
        return Err(Error::ConvergenceViolation { max_abs_delta });
    }

    // E0 - V0 = (x_plus - x)(x - x_minus) g0 with constant g0 = (1+lambda^2)/2.
    let amplitude_factor = 2.0 * (problem.mass() / interp.stiffness()).sqrt();
    let scale_hint = PI * amplitude_factor;

    let mut terms = Vec::with_capacity(order as usize + 1);
    let mut prefactor = 1.0;
    for n in 0..=order {
        if n > 0 {
            let k = n as f64;
            prefactor *= -(2.0 * k - 1.0) / (2.0 * k);
        }
        let integral = refine(
            |nodes| {
                chebyshev_angle_sum(
                    &|x| amplitude_factor * delta(x).powi(n as i32),
                    center,
                    radius,
                    nodes,
                )
            },
            spec.node_count,
            spec.refinement_tolerance,
            scale_hint,
        )?;
        terms.push(prefactor * integral);
    }
    Ok(LdeExpansion {
        lambda: interp.lambda(),
        order,
        delta: 1.0,
        terms,
    })
}

const PMS_GRID: usize = 256;
const PMS_BISECTION_TOLERANCE: f64 = 1e-10;

/// Finds the smallest parameter value where the order-truncated period is
/// stationary in lambda.
///
/// The centered finite-difference derivative of the truncated period is
/// scanned over a quadratically spaced grid in (0, lambda_hi], infeasible
/// points (where the expansion ratio exceeds 1) are skipped, and the first
/// confirmed sign change is bisected down to 1e-10. The truncated period is
/// even in lambda, so lambda = 0 is always stationary; when the derivative
/// never changes sign inside the bracket that boundary point is the answer.
pub fn pms_lambda(problem: &OscillatorProblem, order: u32, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if order < 1 {
        return Err(Error::Domain(
            "stationarity selection needs expansion order >= 1: \
             the order-0 period has no interior stationary point"
                .into(),
        ));
    }
    let tp = problem.turning_points()?;
    let energy = problem.energy_at_rest();
    // For the cubic force this is exactly mu A^2; in general it measures how
    // far the well is from the unit harmonic one at this energy.
    let z_effective = (4.0 * energy / (tp.x_plus * tp.x_plus) - 2.0).max(0.0);
    let lambda_hi = 10.0 * (1.0 + z_effective).sqrt();
    let step = 1e-5 * lambda_hi;

    let truncated_period = |lambda: f64| -> Result<f64> {
        Ok(period_series(problem, &InterpolatingPotential::new(lambda)?, order, spec)?.total())
    };
    // Returns the derivative and a noise floor below which its sign is not
    // trustworthy (quadrature tolerance amplified by the difference quotient).
    let derivative = |lambda: f64| -> Result<(f64, f64)> {
        let above = truncated_period(lambda + step)?;
        let below = truncated_period(lambda - step)?;
        let noise = 50.0 * spec.refinement_tolerance * (above.abs() + below.abs()) / step;
        Ok(((above - below) / (2.0 * step), noise))
    };

    let mut any_feasible = false;
    let mut confirmed: Option<(f64, f64)> = None;
    let mut bracket = None;
    for k in 0..PMS_GRID {
        let fraction = (k + 1) as f64 / PMS_GRID as f64;
        let lambda = lambda_hi * fraction * fraction;
        let Ok((slope, noise)) = derivative(lambda) else {
            continue;
        };
        any_feasible = true;
        if slope.abs() <= noise {
            continue;
        }
        if let Some((previous_lambda, previous_slope)) = confirmed {
            if previous_slope.signum() != slope.signum() {
                bracket = Some((previous_lambda, previous_slope, lambda));
                break;
            }
        }
        confirmed = Some((lambda, slope));
    }

    let Some((mut lo, slope_lo, mut hi)) = bracket else {
        if !any_feasible {
            return Err(Error::NoStationaryPoint);
        }
        // No interior crossing: the boundary stationary point at lambda = 0.
        return Ok(0.0);
    };
    while hi - lo > PMS_BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let (slope, _) = derivative(mid)?;
        if slope.signum() == slope_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn validate_duffing_input(mu: f64, amplitude: f64) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::Domain(format!(
            "cubic coefficient mu = {mu} must be finite and nonnegative"
        )));
    }
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(Error::Domain(format!(
            "amplitude = {amplitude} must be finite and positive"
        )));
    }
    let z = mu * amplitude * amplitude;
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "nonlinearity measure mu A^2 = {z} overflows"
        )));
    }
    Ok(z)
}

/// First-order stationary parameter for the cubic force: sqrt(3 mu) A / 2.
pub fn duffing_lambda_pms(mu: f64, amplitude: f64) -> Result<f64> {
    validate_duffing_input(mu, amplitude)?;
    Ok(0.5 * (3.0 * mu).sqrt() * amplitude)
}

/// First-order stationary period 4 pi / sqrt(4 + 3 mu A^2) of the cubic
/// force, with its frequency and the parameter that produced it.
pub fn duffing_period_pms(mu: f64, amplitude: f64) -> Result<PeriodResult> {
    let z = validate_duffing_input(mu, amplitude)?;
    let period = 4.0 * PI / (4.0 + 3.0 * z).sqrt();
    PeriodResult::new(period, duffing_lambda_pms(mu, amplitude)?, 1)
}

/// First-order time at which the cubic-force oscillator released from rest at
/// A first reaches position X:
/// Omega t = arccos(X/A) - z (X/A) sqrt(1 - X^2/A^2) / (6z + 8), z = mu A^2.
pub fn duffing_time_of_position(mu: f64, amplitude: f64, x: f64) -> Result<f64> {
    let z = validate_duffing_input(mu, amplitude)?;
    if x.abs() > amplitude * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "position X = {x} outside the oscillation range [-{amplitude}, {amplitude}]"
        )));
    }
    let u = (x / amplitude).clamp(-1.0, 1.0);
    let phase = u.acos() - z / (6.0 * z + 8.0) * u * (1.0 - u * u).sqrt();
    Ok(2.0 * phase / (4.0 + 3.0 * z).sqrt())
}

/// Position at arbitrary time under the same first-order solution.
///
/// The time is reduced modulo the stationary period, reflected into the first
/// half period through X(T - t) = X(t), and the phase equation is inverted by
/// bisection (the phase is strictly decreasing in X) with a Newton polish.
pub fn duffing_position_of_time(mu: f64, amplitude: f64, t: f64) -> Result<f64> {
    let z = validate_duffing_input(mu, amplitude)?;
    let period = 4.0 * PI / (4.0 + 3.0 * z).sqrt();
    let mut reduced = t.rem_euclid(period);
    if reduced > 0.5 * period {
        reduced = period - reduced;
    }
    let target = (0.5 * (4.0 + 3.0 * z).sqrt() * reduced).clamp(0.0, PI);
    let shape = z / (6.0 * z + 8.0);
    let phase_gap = |u: f64| u.acos() - shape * u * (1.0 - u * u).sqrt() - target;

    let mut lo = -1.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if phase_gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..6 {
        let root = (1.0 - u * u).sqrt();
        if root == 0.0 {
            break;
        }
        let slope = -(1.0 + shape * (1.0 - 2.0 * u * u)) / root;
        let correction = phase_gap(u) / slope;
        u = (u - correction).clamp(-1.0, 1.0);
        if correction.abs() <= 1e-13 {
            break;
        }
    }
    Ok(amplitude * u)
}
