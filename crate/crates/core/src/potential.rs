//! Conservative one-dimensional systems.
//!
//! A [`PolynomialPotential`] stores V(x) as coefficients of x^k with the
//! normalization V(0) = 0, so the equation of motion reads
//!
//! ```text
//!     m x'' + f(x) = 0,      f(x) = dV/dx
//! ```
//!
//! An [`OscillatorProblem`] adds the mass and the amplitude A of the initial
//! condition x(0) = A, v(0) = 0, which fixes the energy E = V(A). Turning
//! points are the real roots of V(x) = E that bracket the oscillation.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// V(x) = sum_k coefficients[k] x^k with coefficients[0] = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    coefficients: Vec<f64>,
}

impl PolynomialPotential {
    /// Builds a potential from raw coefficients.
    ///
    /// Requires `coefficients[0] == 0` (zero of energy at the origin) and at
    /// least one nonzero entry.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        match coefficients.first() {
            None => return Err(Error::Domain("empty coefficient list".into())),
            Some(&c0) if c0 != 0.0 => {
                return Err(Error::Domain(format!(
                    "constant term must vanish (got {c0}); potentials are normalized to V(0)=0"
                )));
            }
            _ => {}
        }
        if !coefficients.iter().any(|&c| c != 0.0) {
            return Err(Error::Domain("potential is identically zero".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    /// The harmonic well x^2/2.
    pub fn harmonic() -> Self {
        Self {
            coefficients: vec![0.0, 0.0, 0.5],
        }
    }

    /// The Duffing well x^2/2 + mu x^4/4 (mu >= 0).
    pub fn duffing(mu: f64) -> Self {
        Self {
            coefficients: vec![0.0, 0.0, 0.5, 0.0, mu / 4.0],
        }
    }

    /// The pure quartic well mu x^4/4.
    pub fn pure_quartic(mu: f64) -> Self {
        Self {
            coefficients: vec![0.0, 0.0, 0.0, 0.0, mu / 4.0],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// V(x) by Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }

    /// The restoring term f(x) = dV/dx of the equation of motion.
    pub fn eval_force(&self, x: f64) -> f64 {
        horner_derivative(&self.coefficients, x)
    }

    /// True when only even powers appear (V(-x) = V(x) exactly).
    pub fn is_even(&self) -> bool {
        self.coefficients
            .iter()
            .skip(1)
            .step_by(2)
            .all(|&c| c == 0.0)
    }

    /// Recovers mu when the coefficients match the Duffing family
    /// x^2/2 + mu x^4/4 exactly (the harmonic well counts as mu = 0).
    pub(crate) fn duffing_mu(&self) -> Option<f64> {
        let c = &self.coefficients;
        if c.len() < 3 || c.len() > 5 || c[2] != 0.5 {
            return None;
        }
        if c[1] != 0.0 || c.get(3).is_some_and(|&v| v != 0.0) {
            return None;
        }
        let c4 = c.get(4).copied().unwrap_or(0.0);
        (c4 >= 0.0).then_some(4.0 * c4)
    }
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// A potential with a mass and the rest amplitude of the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorProblem {
    potential: PolynomialPotential,
    mass: f64,
    amplitude: f64,
}

impl OscillatorProblem {
    pub fn new(potential: PolynomialPotential, mass: f64, amplitude: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive (got {mass})")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::Domain(format!(
                "amplitude must be positive (got {amplitude})"
            )));
        }
        Ok(Self {
            potential,
            mass,
            amplitude,
        })
    }

    /// Unit-mass Duffing problem, the configuration used by every closed form.
    pub fn duffing(mu: f64, amplitude: f64) -> Result<Self> {
        if mu < 0.0 {
            return Err(Error::Domain(format!(
                "quartic strength must be nonnegative (got {mu})"
            )));
        }
        Self::new(PolynomialPotential::duffing(mu), 1.0, amplitude)
    }

    /// Duffing problem at unit amplitude, so the nonlinearity is z = mu.
    ///
    /// Periods and coefficient ratios of the Duffing family depend on
    /// (mu, A) only through z = mu A^2; sweeps over z use this form to keep
    /// every intermediate quantity O(z) instead of O(mu A^4).
    pub fn duffing_unit(z: f64) -> Result<Self> {
        Self::duffing(z, 1.0)
    }

    pub fn potential(&self) -> &PolynomialPotential {
        &self.potential
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// E = V(A), fixed by releasing the body at rest from x = A.
    pub fn energy_at_rest(&self) -> f64 {
        self.potential.eval(self.amplitude)
    }

    /// Turning points of the oscillation through the origin.
    pub fn turning_points(&self) -> Result<TurningPoints> {
        turning_points(&self.potential, self.energy_at_rest(), 0.0)
    }
}

/// The oscillation interval endpoints, V(x_minus) = V(x_plus) = E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub x_minus: f64,
    pub x_plus: f64,
}

impl TurningPoints {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_plus + self.x_minus)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x_plus - self.x_minus)
    }
}

/// Solves V(x) = E for the pair of real roots bracketing `x_seed`.
///
/// Roots come from the companion matrix of E - V(x) (robust near double
/// roots) and get one Newton polish step each. Even potentials return the
/// exactly symmetric pair (-x_plus, x_plus).
pub fn turning_points(
    p: &PolynomialPotential,
    energy: f64,
    x_seed: f64,
) -> Result<TurningPoints> {
    // w(x) = E - V(x); turning points are its real roots.
    let mut w: Vec<f64> = p.coefficients().iter().map(|&c| -c).collect();
    w[0] += energy;

    let roots = real_roots(&w)?;
    let polish = |x0: f64| -> f64 {
        let f = horner(&w, x0);
        let fp = horner_derivative(&w, x0);
        if fp.abs() > f64::MIN_POSITIVE {
            x0 - f / fp
        } else {
            x0
        }
    };

    let below = roots
        .iter()
        .copied()
        .filter(|&r| r < x_seed)
        .fold(f64::NEG_INFINITY, f64::max);
    let above = roots
        .iter()
        .copied()
        .filter(|&r| r >= x_seed)
        .fold(f64::INFINITY, f64::min);
    if !below.is_finite() || !above.is_finite() {
        return Err(Error::NoOscillation);
    }

    let x_plus = polish(above);
    let x_minus = if p.is_even() && x_seed == 0.0 {
        -x_plus
    } else {
        polish(below)
    };
    if x_minus.partial_cmp(&x_plus) != Some(Ordering::Less) {
        return Err(Error::NoOscillation);
    }
    Ok(TurningPoints { x_minus, x_plus })
}

fn horner_derivative(coefficients: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..coefficients.len()).rev() {
        acc = acc * x + k as f64 * coefficients[k];
    }
    acc
}

/// Real roots of a dense polynomial via companion-matrix eigenvalues.
fn real_roots(coefficients: &[f64]) -> Result<Vec<f64>> {
    let degree = match coefficients.iter().rposition(|&c| c != 0.0) {
        Some(0) | None => return Err(Error::NoOscillation),
        Some(d) => d,
    };
    if degree == 1 {
        return Ok(vec![-coefficients[0] / coefficients[1]]);
    }

    let lead = coefficients[degree];
    let companion = DMatrix::from_fn(degree, degree, |i, j| {
        if j == degree - 1 {
            -coefficients[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });

    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|e| e.im.abs() <= 1e-8 * (1.0 + e.re.abs()))
        .map(|e| e.re)
        .collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn duffing_potential_values() {
        let p = PolynomialPotential::duffing(1.0);
        assert_eq!(p.eval(0.0), 0.0);
        assert_abs_diff_eq!(p.eval(1.0), 0.75);
        assert_abs_diff_eq!(PolynomialPotential::harmonic().eval(2.0), 2.0);
    }

    #[test]
    fn restoring_force_values() {
        let p = PolynomialPotential::duffing(1.0);
        assert_eq!(p.eval_force(0.0), 0.0);
        assert_abs_diff_eq!(p.eval_force(1.0), 2.0);
        assert_abs_diff_eq!(PolynomialPotential::harmonic().eval_force(-3.0), -3.0);
    }

    #[test]
    fn force_is_the_derivative_second_order_in_h() {
        let p = PolynomialPotential::duffing(2.5);
        let x = 0.7;
        let fd = |h: f64| (p.eval(x + h) - p.eval(x - h)) / (2.0 * h) - p.eval_force(x);
        let coarse = fd(1e-3).abs();
        let fine = fd(5e-4).abs();
        let order = (coarse / fine).log2();
        assert!(
            (1.7..2.3).contains(&order),
            "observed convergence order {order}"
        );
    }

    #[test]
    fn rest_energy() {
        let duffing = OscillatorProblem::duffing(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(duffing.energy_at_rest(), 0.75);

        let harmonic =
            OscillatorProblem::new(PolynomialPotential::harmonic(), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(harmonic.energy_at_rest(), 0.5);

        let quartic =
            OscillatorProblem::new(PolynomialPotential::pure_quartic(4.0), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(quartic.energy_at_rest(), 1.0);
    }

    #[test]
    fn duffing_turning_points() {
        let tp = turning_points(&PolynomialPotential::duffing(1.0), 0.75, 0.0).unwrap();
        assert_relative_eq!(tp.x_minus, -1.0, max_relative = 1e-12);
        assert_relative_eq!(tp.x_plus, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn harmonic_turning_points() {
        let tp = turning_points(&PolynomialPotential::harmonic(), 0.5, 0.0).unwrap();
        assert_relative_eq!(tp.x_minus, -1.0, max_relative = 1e-12);
        assert_relative_eq!(tp.x_plus, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn energy_below_minimum_has_no_oscillation() {
        let err = turning_points(&PolynomialPotential::harmonic(), -1.0, 0.0).unwrap_err();
        assert_eq!(err, Error::NoOscillation);
    }

    #[test]
    fn even_potentials_give_exactly_symmetric_endpoints() {
        for mu in [0.0, 0.3, 7.0, 1e6] {
            let problem = OscillatorProblem::duffing(mu, 1.3).unwrap();
            let tp = problem.turning_points().unwrap();
            assert_eq!(tp.x_minus, -tp.x_plus);
        }
    }

    #[test]
    fn asymmetric_cubic_brackets_the_seed() {
        // V = x^2/2 + x^3/5 is a single well around the origin at low energy.
        let p = PolynomialPotential::new(vec![0.0, 0.0, 0.5, 0.2]).unwrap();
        let energy = p.eval(0.5);
        let tp = turning_points(&p, energy, 0.0).unwrap();
        assert!(tp.x_minus < 0.0 && tp.x_plus > 0.0);
        assert_relative_eq!(tp.x_plus, 0.5, max_relative = 1e-12);
        assert_relative_eq!(p.eval(tp.x_minus), energy, max_relative = 1e-12);
    }

    #[test]
    fn invalid_constructions_are_rejected() {
        assert!(PolynomialPotential::new(vec![1.0, 0.0, 0.5]).is_err());
        assert!(PolynomialPotential::new(vec![0.0, 0.0, 0.0]).is_err());
        assert!(OscillatorProblem::duffing(1.0, -2.0).is_err());
        assert!(OscillatorProblem::duffing(-0.5, 1.0).is_err());
        assert!(
            OscillatorProblem::new(PolynomialPotential::harmonic(), 0.0, 1.0).is_err()
        );
    }

    proptest! {
        #[test]
        fn turning_points_reproduce_the_energy(
            mu in 0.0f64..50.0,
            amplitude in 0.1f64..4.0,
        ) {
            let problem = OscillatorProblem::duffing(mu, amplitude).unwrap();
            let tp = problem.turning_points().unwrap();
            let energy = problem.energy_at_rest();
            prop_assert!(tp.x_minus < tp.x_plus);
            let err = (problem.potential().eval(tp.x_plus) - energy).abs();
            prop_assert!(err <= 1e-12 * energy.abs().max(1.0));
        }
    }
}
