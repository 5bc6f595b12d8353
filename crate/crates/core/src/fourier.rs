//! Fourier content of the first-order stationary solution for the
//! cubic-force oscillator, closed-form through third order in the small
//! trajectory parameter and numerically to machine precision, plus the
//! third-order Lindstedt-Poincare reference series.

use std::f64::consts::PI;

use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::lde::duffing_period_pms;
use crate::quadrature::{refine, QuadratureSpec};

/// Exact rational series coefficient.
pub type SeriesCoefficient = Ratio<i128>;

/// An odd-harmonic cosine spectrum: X(t) = sum c_n cos((2n+1) Omega t).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    pub frequency: f64,
    pub coefficients: Vec<f64>,
}

/// Bookkeeping for the closed-form expansion truncated at third order in the
/// trajectory parameter xi = -z u sqrt(1-u^2)/(6z+8), u = X/A, z = mu A^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XiSeries {
    order: u32,
}

impl Default for XiSeries {
    fn default() -> Self {
        Self { order: 3 }
    }
}

impl XiSeries {
    /// Upper bound of |xi| over all positions and couplings.
    pub const BOUND: f64 = 1.0 / 12.0;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The expansion variable at relative position u = X/A.
    pub fn value(z: f64, u: f64) -> f64 {
        -z * u * (1.0 - u * u).sqrt() / (6.0 * z + 8.0)
    }

    /// max |xi| over u, attained at u = 1/sqrt(2): z/(2(6z+8)), at most 1/12.
    pub fn max_abs(z: f64) -> f64 {
        z / (2.0 * (6.0 * z + 8.0))
    }
}

// c_n / A as a ratio of integer polynomials in z = mu A^2, ascending powers.
// Keeping them as integers preserves the exact rational values; floats enter
// only at evaluation time.
const CLOSED_NUMERATORS: [&[i128]; 4] = [
    &[65536, 145408, 107456, 26449],
    &[0, 16384, 36096, 26424, 6435],
    &[0, 0, 3840, 5560, 2135],
    &[0, 0, 0, 784, 245],
];
const CLOSED_DENOMINATORS: [&[i128]; 4] = [
    &[65536, 147456, 110592, 27648],
    &[524288, 1572864, 1769472, 884736, 165888],
    &[1572864, 4718592, 5308416, 2654208, 497664],
    &[3145728, 9437184, 10616832, 5308416, 995328],
];

fn horner_i128(coefficients: &[i128], x: f64) -> f64 {
    coefficients
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x + c as f64)
}

/// P(z)/Q(z) for equal-degree P, Q; large arguments are evaluated through
/// the reversed polynomials in 1/z so intermediates never overflow.
fn rational_value(p: &[i128], q: &[i128], z: f64) -> f64 {
    if z <= 1.0 {
        horner_i128(p, z) / horner_i128(q, z)
    } else {
        let w = 1.0 / z;
        let reversed =
            |c: &[i128]| c.iter().fold(0.0, |acc, &coefficient| acc * w + coefficient as f64);
        reversed(p) / reversed(q)
    }
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
    Ok(mu * amplitude * amplitude)
}

/// Closed-form spectrum of the first-order stationary solution, truncated at
/// third order in xi: four coefficients plus the stationary frequency.
pub fn duffing_pms_coefficients_closed(mu: f64, amplitude: f64) -> Result<FourierSpectrum> {
    let z = validate_duffing_input(mu, amplitude)?;
    let coefficients = (0..4)
        .map(|n| amplitude * rational_value(CLOSED_NUMERATORS[n], CLOSED_DENOMINATORS[n], z))
        .collect();
    Ok(FourierSpectrum {
        frequency: duffing_period_pms(mu, amplitude)?.frequency,
        coefficients,
    })
}

fn trapezoid_half_period(f: &impl Fn(f64) -> f64, panels: usize) -> f64 {
    let h = PI / panels as f64;
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for k in 1..panels {
        sum += f(k as f64 * h);
    }
    sum * h
}

/// Fourier coefficient of the full (un-truncated) first-order stationary
/// solution, by projection.
///
/// Substituting X = A cos(theta) into the projection integral removes the
/// endpoint singularity and yields
///   c_n = -A/(pi(3z+4)) * Int_0^pi cos(theta)(2z cos^2(theta) - 7z - 8)
///                                  cos((2n+1) phi(theta)) d(theta),
/// phi(theta) = theta - z cos(theta) sin(theta)/(6z+8). The integrand extends
/// to a smooth even periodic function, so the doubled trapezoid rule
/// converges spectrally.
pub fn duffing_pms_coefficient_numeric(
    mu: f64,
    amplitude: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let z = validate_duffing_input(mu, amplitude)?;
    spec.validate()?;
    let shape = z / (6.0 * z + 8.0);
    let odd = (2 * n + 1) as f64;
    let integrand = move |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let phase = theta - shape * cos * sin;
        cos * (2.0 * z * cos * cos - 7.0 * z - 8.0) * (odd * phase).cos()
    };
    let integral = refine(
        |panels| trapezoid_half_period(&integrand, panels),
        spec.node_count,
        spec.refinement_tolerance,
        PI * (3.0 * z + 4.0),
    )?;
    Ok(-amplitude / (PI * (3.0 * z + 4.0)) * integral)
}

// The printed weak-coupling expansions of c_n/A in powers of z.
const SMALL_MU: [[(i128, i128); 4]; 4] = [
    [(1, 1), (-1, 32), (23, 1024), (-1055, 65536)],
    [(0, 1), (1, 32), (-51, 2048), (1287, 65536)],
    [(0, 1), (0, 1), (5, 2048), (-745, 196608)],
    [(0, 1), (0, 1), (0, 1), (49, 196608)],
];

/// Weak-coupling expansion coefficients of c_n/A in powers of mu A^2, exact
/// rationals through third order. Defined for n = 0..=3.
pub fn small_mu_series(n: usize) -> Result<Vec<SeriesCoefficient>> {
    if n > 3 {
        return Err(Error::Domain(format!(
            "weak-coupling series is tabulated only for the first four harmonics, got n = {n}"
        )));
    }
    Ok(SMALL_MU[n]
        .iter()
        .map(|&(numerator, denominator)| Ratio::new(numerator, denominator))
        .collect())
}

/// Small-z Taylor expansion of the closed-form ratio c_n(z)/A, in exact
/// rational arithmetic, obtained by long division of the tabulated P_n/Q_n.
/// Truncating at four terms must reproduce small_mu_series exactly.
pub fn closed_form_small_z_expansion(n: usize, terms: usize) -> Result<Vec<SeriesCoefficient>> {
    if n > 3 {
        return Err(Error::Domain(format!(
            "closed form carries only the first four harmonics, got n = {n}"
        )));
    }
    Ok(rational_taylor(
        CLOSED_NUMERATORS[n],
        CLOSED_DENOMINATORS[n],
        terms,
    ))
}

/// Taylor coefficients of P(z)/Q(z) in exact rational arithmetic.
fn rational_taylor(p: &[i128], q: &[i128], terms: usize) -> Vec<SeriesCoefficient> {
    let coefficient = |c: &[i128], k: usize| {
        Ratio::from_integer(c.get(k).copied().unwrap_or(0))
    };
    let mut series: Vec<SeriesCoefficient> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut value = coefficient(p, k);
        for j in 1..=k {
            value -= coefficient(q, j) * series[k - j];
        }
        series.push(value / coefficient(q, 0));
    }
    series
}

const LP_COEFFICIENTS: [[(i128, i128); 4]; 4] = [
    [(1, 1), (-1, 32), (23, 1024), (-547, 32768)],
    [(0, 1), (1, 32), (-3, 128), (29, 16384)],
    [(0, 1), (0, 1), (1, 1024), (-3, 2048)],
    [(0, 1), (0, 1), (0, 1), (1, 32768)],
];
const LP_FREQUENCY: [(i128, i128); 4] = [(1, 1), (3, 8), (-21, 256), (81, 2048)];

/// Third-order Lindstedt-Poincare solution of the same oscillator.
///
/// This is a plain power series in z = mu A^2, trustworthy for z < 1; the
/// caller is expected to warn (not fail) outside that range.
pub fn lp_coefficients(mu: f64, amplitude: f64) -> Result<FourierSpectrum> {
    let z = validate_duffing_input(mu, amplitude)?;
    let evaluate = |table: &[(i128, i128)]| {
        table
            .iter()
            .rev()
            .fold(0.0, |acc, &(n, d)| acc * z + n as f64 / d as f64)
    };
    Ok(FourierSpectrum {
        frequency: evaluate(&LP_FREQUENCY),
        coefficients: LP_COEFFICIENTS
            .iter()
            .map(|row| amplitude * evaluate(row))
            .collect(),
    })
}

/// Evaluates the cosine sum of the spectrum at time t.
pub fn synthesize(spectrum: &FourierSpectrum, t: f64) -> f64 {
    spectrum
        .coefficients
        .iter()
        .enumerate()
        .map(|(n, c)| c * ((2 * n + 1) as f64 * spectrum.frequency * t).cos())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::duffing_exact_solution;
    use crate::lde::duffing_position_of_time;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn closed_spectrum_degenerates_to_pure_cosine() {
        let spectrum = duffing_pms_coefficients_closed(0.0, 2.5).unwrap();
        assert_eq!(spectrum.frequency, 1.0);
        assert_eq!(spectrum.coefficients, vec![2.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_leading_coefficient_at_unit_coupling() {
        let spectrum = duffing_pms_coefficients_closed(1.0, 1.0).unwrap();
        assert_relative_eq!(
            spectrum.coefficients[0],
            344849.0 / 351232.0,
            max_relative = 1e-15
        );
        assert!((spectrum.coefficients[0] - 0.98183).abs() < 1e-5);
        assert_relative_eq!(
            spectrum.frequency,
            7.0_f64.sqrt() / 2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn closed_spectrum_strong_coupling_limits() {
        let spectrum = duffing_pms_coefficients_closed(1e12, 1.0).unwrap();
        assert_relative_eq!(
            spectrum.coefficients[0],
            26449.0 / 27648.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            spectrum.coefficients[1],
            6435.0 / 165888.0,
            max_relative = 1e-10
        );
        // The rational evaluation must not overflow even at absurd coupling.
        let extreme = duffing_pms_coefficients_closed(1e300, 1.0).unwrap();
        for c in &extreme.coefficients {
            assert!(c.is_finite());
        }
        assert!((extreme.coefficients[0] - 26449.0 / 27648.0).abs() < 1e-12);
    }

    #[test]
    fn closed_coefficients_are_ordered_and_positive() {
        let spectrum = duffing_pms_coefficients_closed(1.0, 1.0).unwrap();
        let c = &spectrum.coefficients;
        assert!(c[0] > c[1] && c[1] > c[2] && c[2] > c[3] && c[3] > 0.0);
    }

    #[test]
    fn truncation_reproduces_weak_coupling_rationals_exactly() {
        for n in 0..4 {
            let expanded = closed_form_small_z_expansion(n, 4).unwrap();
            assert_eq!(expanded, small_mu_series(n).unwrap(), "harmonic {n}");
        }
        assert!(closed_form_small_z_expansion(4, 4).is_err());
    }

    #[test]
    fn weak_coupling_series_reference_entries() {
        let c0 = small_mu_series(0).unwrap();
        assert_eq!(c0[0], Ratio::from_integer(1));
        assert_eq!(c0[1], Ratio::new(-1, 32));
        let c1 = small_mu_series(1).unwrap();
        assert_eq!(c1[0], Ratio::from_integer(0));
        assert_eq!(c1[1], Ratio::new(1, 32));
        let c3 = small_mu_series(3).unwrap();
        assert_eq!(c3[3], Ratio::new(49, 196608));
        assert!(matches!(small_mu_series(4), Err(Error::Domain(_))));
    }

    #[test]
    fn numeric_projection_degenerates_with_the_coupling() {
        assert_abs_diff_eq!(
            duffing_pms_coefficient_numeric(0.0, 1.0, 0, &spec()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        for n in 1..3 {
            assert!(
                duffing_pms_coefficient_numeric(0.0, 1.0, n, &spec())
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn numeric_and_closed_leading_coefficients_agree() {
        // The closed form truncates at xi^3, so the gap scales like xi^4.
        let cases = [(0.1, 1e-9), (1.0, 1e-7), (10.0, 2e-6)];
        for (z, tolerance) in cases {
            let closed = duffing_pms_coefficients_closed(z, 1.0).unwrap().coefficients[0];
            let numeric = duffing_pms_coefficient_numeric(z, 1.0, 0, &spec()).unwrap();
            let relative = (numeric / closed - 1.0).abs();
            assert!(relative < tolerance, "z = {z}: relative {relative}");
            assert!(relative < 1e-4);
        }
    }

    #[test]
    fn numeric_and_closed_overtones_agree_at_their_scale() {
        let closed = duffing_pms_coefficients_closed(1.0, 1.0).unwrap().coefficients;
        for (n, absolute) in [(1, 1e-4), (2, 5e-5), (3, 5e-5)] {
            let numeric = duffing_pms_coefficient_numeric(1.0, 1.0, n, &spec()).unwrap();
            let gap = (numeric - closed[n as usize]).abs();
            assert!(gap < absolute, "n = {n}: gap {gap}");
        }
    }

    #[test]
    fn spectrum_sums_close_to_the_release_amplitude() {
        for &z in &[0.1, 1.0, 10.0] {
            let spectrum = duffing_pms_coefficients_closed(z, 1.0).unwrap();
            let at_release = synthesize(&spectrum, 0.0);
            assert!(
                (at_release - 1.0).abs() < 1e-3,
                "z = {z}: X(0) = {at_release}"
            );
        }
    }

    #[test]
    fn lp_series_degenerates_to_pure_cosine() {
        let spectrum = lp_coefficients(0.0, 1.5).unwrap();
        assert_eq!(spectrum.frequency, 1.0);
        assert_eq!(spectrum.coefficients, vec![1.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn lp_first_harmonic_opens_at_one_thirtysecond() {
        let z = 1e-6;
        let spectrum = lp_coefficients(z, 1.0).unwrap();
        assert_relative_eq!(spectrum.coefficients[1], z / 32.0, max_relative = 1e-5);
        // First-order weak-coupling growth agrees with the stationary series.
        let pms = small_mu_series(1).unwrap();
        assert_eq!(pms[1], Ratio::new(1, 32));
        assert_eq!(LP_COEFFICIENTS[1][1], (1, 32));
        assert_eq!(LP_COEFFICIENTS[0][1], (-1, 32));
    }

    #[test]
    fn lp_frequency_has_fourth_order_contact_with_the_exact_one() {
        let gap = |z: f64| {
            let exact = 2.0 * PI / crate::exact::duffing_exact_period(z, 1.0).unwrap();
            (lp_coefficients(z, 1.0).unwrap().frequency - exact).abs()
        };
        let ratio = gap(0.02) / gap(0.01);
        assert!((14.0..18.0).contains(&ratio), "halving ratio {ratio}");
    }

    #[test]
    fn lp_trajectory_tracks_the_exact_solution_for_weak_coupling() {
        let z = 0.01;
        let spectrum = lp_coefficients(z, 1.0).unwrap();
        let period = 2.0 * PI / spectrum.frequency;
        let mut worst = 0.0_f64;
        for i in 0..=200 {
            let t = period * i as f64 / 200.0;
            let gap = (synthesize(&spectrum, t) - duffing_exact_solution(z, 1.0, t).unwrap()).abs();
            worst = worst.max(gap);
        }
        assert!(worst < 1e-6, "max deviation {worst}");
    }

    #[test]
    fn synthesize_basics() {
        let spectrum = FourierSpectrum {
            frequency: 1.0,
            coefficients: vec![1.0],
        };
        assert_relative_eq!(synthesize(&spectrum, PI), -1.0, max_relative = 1e-15);

        let pms = duffing_pms_coefficients_closed(1.0, 1.0).unwrap();
        let sum: f64 = pms.coefficients.iter().sum();
        assert_relative_eq!(synthesize(&pms, 0.0), sum, max_relative = 1e-15);
        let half_period = PI / pms.frequency;
        assert_relative_eq!(
            synthesize(&pms, half_period),
            -sum,
            max_relative = 1e-12
        );
    }

    #[test]
    fn xi_is_bounded_by_one_twelfth() {
        let series = XiSeries::new();
        assert_eq!(series.order(), 3);
        for &z in &[1e-3, 0.1, 1.0, 10.0, 1e4, 1e8] {
            let mut sampled = XiSeries::value(z, 0.5_f64.sqrt()).abs();
            for i in 0..=1000 {
                let u = i as f64 / 500.0 - 1.0;
                sampled = sampled.max(XiSeries::value(z, u).abs());
            }
            assert_relative_eq!(sampled, XiSeries::max_abs(z), max_relative = 1e-6);
            assert!(XiSeries::max_abs(z) <= XiSeries::BOUND + 1e-15);
        }
        // The bound saturates in the strong-coupling limit.
        assert!(XiSeries::max_abs(1e12) > XiSeries::BOUND - 1e-10);
    }

    #[test]
    fn stationary_trajectory_contains_only_odd_cosines() {
        let (mu, amplitude) = (1.0, 1.0);
        let result = duffing_period_pms(mu, amplitude).unwrap();
        let samples = 2048;
        let mut positions = Vec::with_capacity(samples);
        for j in 0..samples {
            let t = result.period * j as f64 / samples as f64;
            positions.push(duffing_position_of_time(mu, amplitude, t).unwrap());
        }
        let project = |weight: &dyn Fn(f64) -> f64| {
            2.0 / samples as f64
                * positions
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        x * weight(result.frequency * result.period * j as f64 / samples as f64)
                    })
                    .sum::<f64>()
        };
        for k in 1..=3 {
            let even_cos = project(&|phase| (2.0 * k as f64 * phase).cos());
            assert!(even_cos.abs() < 1e-10, "cos 2k projection {even_cos}");
        }
        for k in 1..=6 {
            let sine = project(&|phase| (k as f64 * phase).sin());
            assert!(sine.abs() < 1e-10, "sin projection {sine}");
        }
    }
}
