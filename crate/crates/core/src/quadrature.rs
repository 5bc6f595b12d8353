//! Energy integrals with inverse-square-root endpoint singularities.
//!
//! Every period-style integral here has the shape
//!
//! ```text
//!     I = ∫ f(x) / sqrt((x₊ - x)(x - x₋)) dx      over [x₋, x₊]
//! ```
//!
//! with f smooth. The substitution x = c + r cosθ (c midpoint, r half-width)
//! absorbs the singular weight exactly and turns I into ∫₀^π f(c + r cosθ) dθ,
//! a periodic analytic integrand, so an equally weighted sum over the
//! Chebyshev angles θ_k = (k+1/2)π/n converges spectrally. Node counts double
//! until two successive sums agree to the requested relative tolerance.
//!
//! The period oracle factors E - V(x) = (x₊-x)(x-x₋)·g(x) by synthetic
//! division of the boundary roots, leaving the smooth factor sqrt(2/g).

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::OscillatorProblem;

/// Node budget and stopping tolerance for the refinement loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Starting node count; must be at least 8.
    pub node_count: usize,
    /// Relative agreement required between successive refinements.
    pub refinement_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: 64,
            refinement_tolerance: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::Domain(format!(
                "node_count must be at least 8 (got {})",
                self.node_count
            )));
        }
        if self.refinement_tolerance.is_nan() || self.refinement_tolerance <= 0.0 {
            return Err(Error::Domain(format!(
                "refinement_tolerance must be positive (got {})",
                self.refinement_tolerance
            )));
        }
        Ok(())
    }
}

const MAX_DOUBLINGS: u32 = 16;

/// Runs `value_at(n)` while doubling n until two successive values agree to
/// `tolerance` relative to max(|value|, scale_hint).
pub(crate) fn refine(
    value_at: impl Fn(usize) -> f64,
    start: usize,
    tolerance: f64,
    scale_hint: f64,
) -> Result<f64> {
    let mut n = start;
    let mut previous = value_at(n);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let current = value_at(n);
        residual = (current - previous).abs();
        if residual <= tolerance * current.abs().max(scale_hint) {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::NoConvergence {
        residual,
        tolerance,
        doublings: MAX_DOUBLINGS,
    })
}

/// Midpoint sum over Chebyshev angles; nodes are built in symmetric pairs
/// around the midpoint so odd integrands cancel exactly.
pub(crate) fn chebyshev_angle_sum(f: &impl Fn(f64) -> f64, c: f64, r: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..n / 2 {
        let t = ((k as f64 + 0.5) * PI / n as f64).cos();
        sum += f(c + r * t) + f(c - r * t);
    }
    if n % 2 == 1 {
        sum += f(c);
    }
    sum * PI / n as f64
}

/// ∫ smooth_factor(x)/sqrt((x₊-x)(x-x₋)) dx over [x_minus, x_plus].
///
/// `smooth_factor` must be finite and smooth on the closed interval; it is
/// never evaluated at the endpoints themselves.
pub fn endpoint_singular_integral(
    smooth_factor: impl Fn(f64) -> f64,
    x_minus: f64,
    x_plus: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if x_minus.partial_cmp(&x_plus) != Some(Ordering::Less) {
        return Err(Error::Domain(format!(
            "empty integration interval [{x_minus}, {x_plus}]"
        )));
    }
    let c = 0.5 * (x_plus + x_minus);
    let r = 0.5 * (x_plus - x_minus);
    refine(
        |n| chebyshev_angle_sum(&smooth_factor, c, r, n),
        spec.node_count,
        spec.refinement_tolerance,
        0.0,
    )
}

/// Divides the polynomial by (x - root), returning the quotient and dropping
/// the remainder (callers only deflate known roots).
pub(crate) fn deflate(coefficients: &[f64], root: f64) -> Vec<f64> {
    let d = coefficients.len() - 1;
    let mut quotient = vec![0.0; d];
    let mut carry = coefficients[d];
    for k in (0..d).rev() {
        quotient[k] = carry;
        carry = coefficients[k] + root * carry;
    }
    quotient
}

pub(crate) fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// The smooth positive factor g with E - V(x) = (x₊-x)(x-x₋)·g(x), as
/// polynomial coefficients.
fn deflated_energy_factor(problem: &OscillatorProblem) -> Result<(f64, f64, Vec<f64>)> {
    let tp = problem.turning_points()?;
    let energy = problem.energy_at_rest();

    // w(x) = E - V(x) vanishes at both turning points.
    let mut w: Vec<f64> = problem.potential().coefficients().iter().map(|&c| -c).collect();
    w[0] += energy;
    let q = deflate(&deflate(&w, tp.x_plus), tp.x_minus);
    // (x-x₊)(x-x₋)q = w, and (x₊-x)(x-x₋) = -(x-x₊)(x-x₋), so g = -q.
    let g: Vec<f64> = q.iter().map(|&c| -c).collect();

    // Reject energies that leave a classically forbidden region inside the
    // interval (g must stay strictly positive).
    for k in 0..=128 {
        let theta = PI * k as f64 / 128.0;
        let x = tp.midpoint() + tp.half_width() * theta.cos();
        if horner(&g, x) <= 0.0 {
            return Err(Error::FactorizationFailure);
        }
    }
    Ok((tp.x_minus, tp.x_plus, g))
}

/// Oscillation period by direct quadrature of T = √(2m) ∫ dx/√(E - V).
pub fn period_oracle(problem: &OscillatorProblem, spec: &QuadratureSpec) -> Result<f64> {
    let (x_minus, x_plus, g) = deflated_energy_factor(problem)?;
    let m = problem.mass();
    let smooth = move |x: f64| (2.0 * m / horner(&g, x)).sqrt();
    endpoint_singular_integral(smooth, x_minus, x_plus, spec)
}

/// Time to travel from x₊ (the release point) to `x_target`.
///
/// Same factorization as [`period_oracle`]; the θ-integral runs over the
/// partial range [0, θ_X] with θ_X = arccos((X-c)/r), evaluated by
/// Gauss-Legendre quadrature under the same doubling control. Satisfies
/// time(x₋) = period/2.
pub fn time_oracle(problem: &OscillatorProblem, x_target: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let (x_minus, x_plus, g) = deflated_energy_factor(problem)?;
    let width = x_plus - x_minus;
    if x_target > x_plus + 1e-12 * width || x_target < x_minus - 1e-12 * width {
        return Err(Error::Domain(format!(
            "position {x_target} outside the oscillation interval [{x_minus}, {x_plus}]"
        )));
    }

    let c = 0.5 * (x_plus + x_minus);
    let r = 0.5 * (x_plus - x_minus);
    let theta_x = ((x_target - c) / r).clamp(-1.0, 1.0).acos();
    if theta_x == 0.0 {
        return Ok(0.0);
    }

    let m = problem.mass();
    let integrand = move |theta: f64| (0.5 * m / horner(&g, c + r * theta.cos())).sqrt();
    refine(
        |n| gauss_legendre_sum(&integrand, 0.0, theta_x, n),
        spec.node_count,
        spec.refinement_tolerance,
        0.0,
    )
}

/// n-point Gauss-Legendre rule on [a, b].
fn gauss_legendre_sum(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (node, weight) in gauss_legendre_nodes(n) {
        sum += weight * f(mid + half * node);
    }
    sum * half
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            derivative = dp;
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        rule.push((x, w));
        if x != 0.0 || n.is_multiple_of(2) {
            rule.push((-x, w));
        }
    }
    rule
}

/// Legendre polynomial P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
