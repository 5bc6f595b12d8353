//! Shared fixtures for the solver benchmarks in `benches/solvers.rs`.

use anharmonic::OscillatorProblem;

/// Moderate coupling, unit amplitude: mu A^2 = 1 sits where neither the
/// weak- nor the strong-coupling shortcuts dominate.
pub fn standard_problem() -> OscillatorProblem {
    OscillatorProblem::duffing(1.0, 1.0).expect("benchmark fixture is a valid oscillator")
}
