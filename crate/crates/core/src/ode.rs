//! Direct numerical integration of m x'' + f(x) = 0, used as the
//! model-independent oracle for every approximate solution.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lde::duffing_period_pms;
use crate::potential::OscillatorProblem;

/// A sampled solution of the equation of motion.
///
/// Times are strictly increasing and the three sequences always have equal
/// length; values in between samples are reconstructed by cubic Hermite
/// interpolation, which matches the integrator's own fourth-order accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    positions: Vec<f64>,
    velocities: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn bracket(&self, t: f64) -> usize {
        // Index i with times[i] <= t < times[i+1], clamped to valid segments.
        match self.times.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => i.min(self.times.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.times.len() - 2),
        }
    }

    /// Position at an arbitrary time inside the sampled range; the ends are
    /// clamped rather than extrapolated.
    pub fn sample_position(&self, t: f64) -> f64 {
        assert!(self.len() >= 2, "sampling needs at least two states");
        let t = t.clamp(self.times[0], *self.times.last().unwrap());
        let i = self.bracket(t);
        let dt = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / dt;
        hermite(
            s,
            self.positions[i],
            dt * self.velocities[i],
            self.positions[i + 1],
            dt * self.velocities[i + 1],
        )
    }

    /// Times where the position crosses zero, refined on the local cubic.
    pub fn position_zero_crossings(&self) -> Vec<f64> {
        self.crossings(&self.positions, |i, dt| dt * self.velocities[i])
    }

    /// Times where the velocity crosses zero (turning points of the motion);
    /// the interpolant slope is the acceleration from the equation of motion.
    pub fn velocity_zero_crossings(&self, problem: &OscillatorProblem) -> Vec<f64> {
        self.crossings(&self.velocities, |i, dt| {
            -dt * problem.potential().eval_force(self.positions[i]) / problem.mass()
        })
    }

    fn crossings(&self, values: &[f64], scaled_slope: impl Fn(usize, f64) -> f64) -> Vec<f64> {
        let mut found = Vec::new();
        for i in 0..values.len().saturating_sub(1) {
            // Strictly negative product only: ties and NaN are not crossings.
            let product = values[i] * values[i + 1];
            if product.partial_cmp(&0.0) != Some(Ordering::Less) {
                continue;
            }
            let dt = self.times[i + 1] - self.times[i];
            let cubic = |s: f64| {
                hermite(
                    s,
                    values[i],
                    scaled_slope(i, dt),
                    values[i + 1],
                    scaled_slope(i + 1, dt),
                )
            };
            let mut lo = 0.0;
            let mut hi = 1.0;
            let at_lo = cubic(lo);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if cubic(mid) * at_lo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            found.push(self.times[i] + 0.5 * (lo + hi) * dt);
        }
        found
    }
}

fn hermite(s: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * m1
}

/// Integrates the motion released from rest at the problem amplitude with
/// classical fixed-step fourth-order Runge-Kutta.
///
/// The step is h = T_est / steps_per_period_estimate, where T_est is the
/// first-order stationary period when the potential has the cubic-force
/// shape, and otherwise the period of the reference well whose energy at the
/// outer turning point matches the true one.
pub fn integrate(
    problem: &OscillatorProblem,
    t_end: f64,
    steps_per_period_estimate: u32,
) -> Result<Trajectory> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::Domain(format!(
            "integration horizon t_end = {t_end} must be finite and positive"
        )));
    }
    if steps_per_period_estimate < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 steps per period, got {steps_per_period_estimate}"
        )));
    }
    let period_estimate = match problem.potential().duffing_mu() {
        Some(mu) => duffing_period_pms(mu, problem.amplitude().abs())?.period,
        None => {
            let tp = problem.turning_points()?;
            let energy = problem.energy_at_rest();
            2.0 * PI * (problem.mass() * tp.x_plus * tp.x_plus / (2.0 * energy)).sqrt()
        }
    };
    let h = period_estimate / steps_per_period_estimate as f64;
    if h < 1e-15 {
        return Err(Error::StepUnderflow { step: h });
    }

    let mass = problem.mass();
    let acceleration = |x: f64| -problem.potential().eval_force(x) / mass;
    let full_steps = (t_end / h).floor() as usize;
    let mut times = Vec::with_capacity(full_steps + 2);
    let mut positions = Vec::with_capacity(full_steps + 2);
    let mut velocities = Vec::with_capacity(full_steps + 2);

    let mut x = problem.amplitude();
    let mut v = 0.0;
    times.push(0.0);
    positions.push(x);
    velocities.push(v);

    let advance = |x: &mut f64, v: &mut f64, step: f64| {
        let (k1x, k1v) = (*v, acceleration(*x));
        let (k2x, k2v) = (*v + 0.5 * step * k1v, acceleration(*x + 0.5 * step * k1x));
        let (k3x, k3v) = (*v + 0.5 * step * k2v, acceleration(*x + 0.5 * step * k2x));
        let (k4x, k4v) = (*v + step * k3v, acceleration(*x + step * k3x));
        *x += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        *v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    };

    for i in 1..=full_steps {
        advance(&mut x, &mut v, h);
        times.push(i as f64 * h);
        positions.push(x);
        velocities.push(v);
    }
    let remainder = t_end - full_steps as f64 * h;
    if remainder > 1e-12 * h {
        advance(&mut x, &mut v, remainder);
        times.push(t_end);
        positions.push(x);
        velocities.push(v);
    }
    Ok(Trajectory {
        times,
        positions,
        velocities,
    })
}

/// Worst relative excursion of the conserved energy m v^2/2 + V(x) along the
/// trajectory; 0 for fewer than two samples.
pub fn energy_drift(problem: &OscillatorProblem, trajectory: &Trajectory) -> f64 {
    if trajectory.len() < 2 {
        return 0.0;
    }
    let energy = |i: usize| {
        0.5 * problem.mass() * trajectory.velocities[i] * trajectory.velocities[i]
            + problem.potential().eval(trajectory.positions[i])
    };
    let initial = energy(0);
    (1..trajectory.len())
        .map(|i| (energy(i) - initial).abs())
        .fold(0.0, f64::max)
        / initial.abs()
}
