use std::f64::consts::TAU;

use anharmonic::{
    cn_fourier, duffing_exact_period, duffing_exact_solution, duffing_period_pms,
    duffing_pms_coefficient_numeric, duffing_pms_coefficients_closed, duffing_position_of_time,
    integrate, lp_coefficients, period_oracle, synthesize, Error, OscillatorProblem,
    QuadratureSpec,
};
use rayon::prelude::*;
use serde_json::json;

use crate::output::{csv_document, csv_num, json_document, text_table, write_output};
use crate::{
    AppError, DataFormat, FourierArgs, FourierMethod, PeriodArgs, PeriodMethod, ScanArgs,
    ScanTarget, SolveArgs, SolveMethod, TableFormat,
};

fn usage(message: impl Into<String>) -> AppError {
    AppError::Usage(message.into())
}

fn check_oscillator_flags(mu: f64, amplitude: f64) -> Result<f64, AppError> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(usage(format!("--mu must be finite and non-negative, got {mu}")));
    }
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(usage(format!(
            "--amplitude must be finite and positive, got {amplitude}"
        )));
    }
    let z = mu * amplitude * amplitude;
    if !z.is_finite() {
        return Err(usage(format!("mu A^2 = {z} overflows")));
    }
    Ok(z)
}

fn warn_lp_range(z: f64) {
    if z >= 1.0 {
        eprintln!(
            "warning: the lp series is a plain power series in mu A^2 and is \
             only trustworthy for mu A^2 < 1 (here mu A^2 = {z:.3e})"
        );
    }
}

/// Keeps the first occurrence of each requested method, in canonical order.
fn canonical_selection<M: Copy + PartialEq>(requested: &[M], canonical: &[M]) -> Vec<M> {
    canonical
        .iter()
        .copied()
        .filter(|m| requested.contains(m))
        .collect()
}

fn period_label(method: PeriodMethod) -> &'static str {
    match method {
        PeriodMethod::Pms => "pms",
        PeriodMethod::Exact => "exact",
        PeriodMethod::Quadrature => "quadrature",
        PeriodMethod::Ode => "ode",
        PeriodMethod::Lp => "lp",
        PeriodMethod::All => "all",
    }
}

/// First return time to the release point, read off the integrated
/// trajectory as the second zero of the velocity (the first is the inner
/// turning point at half a period).
fn ode_return_period(mu: f64, amplitude: f64, steps: u32) -> Result<f64, AppError> {
    let problem = OscillatorProblem::duffing(mu, amplitude)?;
    let horizon = 1.25 * duffing_exact_period(mu, amplitude)?;
    let trajectory = integrate(&problem, horizon, steps)?;
    let crossings = trajectory.velocity_zero_crossings(&problem);
    crossings.get(1).copied().ok_or_else(|| {
        AppError::Numeric(Error::Domain(
            "integration horizon did not bracket the return time".into(),
        ))
    })
}

fn period_by_method(
    method: PeriodMethod,
    mu: f64,
    amplitude: f64,
    ode_steps: u32,
) -> Result<f64, AppError> {
    match method {
        PeriodMethod::Pms => Ok(duffing_period_pms(mu, amplitude)?.period),
        PeriodMethod::Exact => Ok(duffing_exact_period(mu, amplitude)?),
        PeriodMethod::Quadrature => {
            let problem = OscillatorProblem::duffing(mu, amplitude)?;
            Ok(period_oracle(&problem, &QuadratureSpec::default())?)
        }
        PeriodMethod::Ode => ode_return_period(mu, amplitude, ode_steps),
        PeriodMethod::Lp => Ok(TAU / lp_coefficients(mu, amplitude)?.frequency),
        PeriodMethod::All => unreachable!("expanded before dispatch"),
    }
}

pub fn period(args: &PeriodArgs) -> Result<(), AppError> {
    let z = check_oscillator_flags(args.mu, args.amplitude)?;
    let methods = match args.method {
        PeriodMethod::All => vec![
            PeriodMethod::Pms,
            PeriodMethod::Exact,
            PeriodMethod::Quadrature,
            PeriodMethod::Ode,
            PeriodMethod::Lp,
        ],
        single => vec![single],
    };
    if methods.contains(&PeriodMethod::Lp) {
        warn_lp_range(z);
    }

    let with_errors = args.method == PeriodMethod::All;
    let exact = if with_errors {
        Some(duffing_exact_period(args.mu, args.amplitude)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(methods.len());
    for &method in &methods {
        let period = period_by_method(method, args.mu, args.amplitude, args.ode_steps)?;
        let error_percent = exact.map(|reference| (period / reference - 1.0).abs() * 100.0);
        rows.push((period_label(method), period, error_percent));
    }

    let content = match args.format {
        TableFormat::Text => {
            let header: &[&str] = if with_errors {
                &["method", "period", "error_vs_exact"]
            } else {
                &["method", "period"]
            };
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|&(label, period, error)| {
                    let mut row = vec![label.to_string(), format!("{period:.6}")];
                    if let Some(error) = error {
                        row.push(format!("{error:.3}%"));
                    }
                    row
                })
                .collect();
            text_table(header, &cells)
        }
        TableFormat::Csv => csv_document(
            "method,period,error_percent",
            rows.iter().map(|&(label, period, error)| {
                format!(
                    "{label},{},{}",
                    csv_num(period),
                    error.map(csv_num).unwrap_or_default()
                )
            }),
        ),
        TableFormat::Json => json_document(
            json!({
                "command": "period",
                "mu": args.mu,
                "amplitude": args.amplitude,
                "method": period_label(args.method),
                "ode_steps_per_period": args.ode_steps,
                "integrator": "classical fixed-step RK4",
            }),
            rows.iter()
                .map(|&(label, period, error)| {
                    json!({ "method": label, "period": period, "error_percent": error })
                })
                .collect(),
        ),
    };
    write_output(args.out.as_deref(), &content)
}

pub fn solve(args: &SolveArgs) -> Result<(), AppError> {
    let z = check_oscillator_flags(args.mu, args.amplitude)?;
    if !args.periods.is_finite() || args.periods <= 0.0 {
        return Err(usage(format!(
            "--periods must be finite and positive, got {}",
            args.periods
        )));
    }
    if args.samples < 2 {
        return Err(usage(format!(
            "--samples must be at least 2 to cover both endpoints, got {}",
            args.samples
        )));
    }
    let methods = canonical_selection(
        &args.methods,
        &[
            SolveMethod::Pms,
            SolveMethod::Exact,
            SolveMethod::Ode,
            SolveMethod::Lp,
        ],
    );
    if methods.contains(&SolveMethod::Lp) {
        warn_lp_range(z);
    }

    let pms = duffing_period_pms(args.mu, args.amplitude)?;
    let t_end = args.periods * pms.period;
    let denominator = (args.samples - 1) as f64;
    let times: Vec<f64> = (0..args.samples)
        .map(|i| t_end * i as f64 / denominator)
        .collect();

    let mut columns: Vec<(&'static str, Vec<f64>)> = Vec::with_capacity(methods.len());
    for &method in &methods {
        let values = match method {
            SolveMethod::Pms => times
                .par_iter()
                .map(|&t| duffing_position_of_time(args.mu, args.amplitude, t))
                .collect::<Result<Vec<_>, _>>()?,
            SolveMethod::Exact => times
                .par_iter()
                .map(|&t| duffing_exact_solution(args.mu, args.amplitude, t))
                .collect::<Result<Vec<_>, _>>()?,
            SolveMethod::Ode => {
                let problem = OscillatorProblem::duffing(args.mu, args.amplitude)?;
                let trajectory = integrate(&problem, t_end, args.ode_steps)?;
                times.iter().map(|&t| trajectory.sample_position(t)).collect()
            }
            SolveMethod::Lp => {
                let spectrum = lp_coefficients(args.mu, args.amplitude)?;
                times.iter().map(|&t| synthesize(&spectrum, t)).collect()
            }
        };
        columns.push((method.column(), values));
    }

    let content = match args.format {
        DataFormat::Csv => {
            let mut header = String::from("t");
            for (name, _) in &columns {
                header.push(',');
                header.push_str(name);
            }
            csv_document(
                &header,
                times.iter().enumerate().map(|(i, &t)| {
                    let mut line = csv_num(t);
                    for (_, values) in &columns {
                        line.push(',');
                        line.push_str(&csv_num(values[i]));
                    }
                    line
                }),
            )
        }
        DataFormat::Json => json_document(
            json!({
                "command": "solve",
                "mu": args.mu,
                "amplitude": args.amplitude,
                "periods": args.periods,
                "samples": args.samples,
                "methods": methods.iter().map(|m| m.label()).collect::<Vec<_>>(),
                "pms_period": pms.period,
                "ode_steps_per_period": args.ode_steps,
                "integrator": "classical fixed-step RK4, step = pms_period / ode_steps_per_period",
            }),
            times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let mut row = serde_json::Map::new();
                    row.insert("t".into(), json!(t));
                    for (name, values) in &columns {
                        row.insert((*name).into(), json!(values[i]));
                    }
                    serde_json::Value::Object(row)
                })
                .collect(),
        ),
    };
    write_output(args.out.as_deref(), &content)
}

/// Exact coefficients A b_n of the elliptic solution; the mu = 0 limit is the
/// pure cosine spectrum, which the general formula cannot represent (its
/// elliptic parameter degenerates to zero).
fn exact_coefficients(mu: f64, amplitude: f64, terms: usize) -> Result<Vec<f64>, AppError> {
    let z = mu * amplitude * amplitude;
    if z == 0.0 {
        let mut values = vec![0.0; terms];
        values[0] = amplitude;
        return Ok(values);
    }
    let m = z / (2.0 * (1.0 + z));
    Ok(cn_fourier(m, terms)?
        .into_iter()
        .map(|b| amplitude * b)
        .collect())
}

pub fn fourier(args: &FourierArgs) -> Result<(), AppError> {
    let z = check_oscillator_flags(args.mu, args.amplitude)?;
    let methods = canonical_selection(
        &args.methods,
        &[
            FourierMethod::PmsClosed,
            FourierMethod::PmsNumeric,
            FourierMethod::Exact,
            FourierMethod::Lp,
        ],
    );
    let truncated = methods
        .iter()
        .any(|m| matches!(m, FourierMethod::PmsClosed | FourierMethod::Lp));
    if truncated && args.order > 3 {
        return Err(usage(format!(
            "pms-closed and lp carry only harmonics 0..=3; lower --order {} or drop them",
            args.order
        )));
    }
    if methods.contains(&FourierMethod::Lp) {
        warn_lp_range(z);
    }
    let terms = args.order as usize + 1;
    let exact = exact_coefficients(args.mu, args.amplitude, terms)?;

    let mut rows: Vec<(&'static str, usize, f64, Option<f64>)> = Vec::new();
    for &method in &methods {
        let values: Vec<f64> = match method {
            FourierMethod::PmsClosed => {
                let spectrum = duffing_pms_coefficients_closed(args.mu, args.amplitude)?;
                spectrum.coefficients[..terms].to_vec()
            }
            FourierMethod::PmsNumeric => (0..terms)
                .into_par_iter()
                .map(|n| {
                    duffing_pms_coefficient_numeric(
                        args.mu,
                        args.amplitude,
                        n as u32,
                        &QuadratureSpec::default(),
                    )
                })
                .collect::<Result<Vec<_>, _>>()?,
            FourierMethod::Exact => exact.clone(),
            FourierMethod::Lp => {
                let spectrum = lp_coefficients(args.mu, args.amplitude)?;
                spectrum.coefficients[..terms].to_vec()
            }
        };
        for (n, &value) in values.iter().enumerate() {
            let error_percent = if exact[n] == 0.0 {
                None
            } else {
                Some((value / exact[n] - 1.0).abs() * 100.0)
            };
            rows.push((method.label(), n, value, error_percent));
        }
    }

    let content = match args.format {
        TableFormat::Text => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|&(label, n, value, error)| {
                    vec![
                        label.to_string(),
                        n.to_string(),
                        format!("{value:.10e}"),
                        error.map_or_else(|| "-".to_string(), |e| format!("{e:.4}%")),
                    ]
                })
                .collect();
            text_table(&["method", "n", "coefficient", "error_vs_exact"], &cells)
        }
        TableFormat::Csv => csv_document(
            "method,n,coefficient,error_percent",
            rows.iter().map(|&(label, n, value, error)| {
                format!(
                    "{label},{n},{},{}",
                    csv_num(value),
                    error.map(csv_num).unwrap_or_default()
                )
            }),
        ),
        TableFormat::Json => json_document(
            json!({
                "command": "fourier",
                "mu": args.mu,
                "amplitude": args.amplitude,
                "order": args.order,
                "methods": methods.iter().map(|m| m.label()).collect::<Vec<_>>(),
            }),
            rows.iter()
                .map(|&(label, n, value, error)| {
                    json!({
                        "method": label,
                        "n": n,
                        "coefficient": value,
                        "error_percent": error,
                    })
                })
                .collect(),
        ),
    };
    write_output(args.out.as_deref(), &content)
}

struct ScanRecord {
    z: f64,
    approximate: f64,
    reference: f64,
    error_percent: f64,
}

/// One grid point of the scan, using the unit-amplitude representative of
/// the coupling class: mu = z, A = 1.
fn scan_point(target: ScanTarget, z: f64) -> Result<ScanRecord, AppError> {
    let (approximate, reference) = match target {
        ScanTarget::PeriodError => (
            duffing_period_pms(z, 1.0)?.period,
            duffing_exact_period(z, 1.0)?,
        ),
        ScanTarget::C0Error => (
            duffing_pms_coefficients_closed(z, 1.0)?.coefficients[0],
            exact_coefficients(z, 1.0, 1)?[0],
        ),
    };
    Ok(ScanRecord {
        z,
        approximate,
        reference,
        error_percent: (approximate / reference - 1.0).abs() * 100.0,
    })
}

pub fn scan(args: &ScanArgs) -> Result<(), AppError> {
    if !args.z_min.is_finite() || args.z_min <= 0.0 {
        return Err(usage(format!(
            "--z-min must be finite and positive, got {}",
            args.z_min
        )));
    }
    if !args.z_max.is_finite() || args.z_max <= args.z_min {
        return Err(usage(format!(
            "--z-max must be finite and exceed --z-min, got {}",
            args.z_max
        )));
    }
    if args.points < 2 {
        return Err(usage(format!(
            "--points must be at least 2 to cover both endpoints, got {}",
            args.points
        )));
    }

    let (ln_lo, ln_hi) = (args.z_min.ln(), args.z_max.ln());
    let denominator = (args.points - 1) as f64;
    let rows: Vec<ScanRecord> = (0..args.points)
        .into_par_iter()
        .map(|i| {
            let z = (ln_lo + (ln_hi - ln_lo) * i as f64 / denominator).exp();
            scan_point(args.target, z)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let content = match args.format {
        DataFormat::Csv => csv_document(
            "z,error_percent",
            rows.iter()
                .map(|row| format!("{},{}", csv_num(row.z), csv_num(row.error_percent))),
        ),
        DataFormat::Json => json_document(
            json!({
                "command": "scan",
                "target": args.target.label(),
                "z_min": args.z_min,
                "z_max": args.z_max,
                "points": args.points,
                "convention": "mu = z at unit amplitude",
            }),
            rows.iter()
                .map(|row| {
                    json!({
                        "z": row.z,
                        "values": { "pms": row.approximate, "exact": row.reference },
                        "error_percent": row.error_percent,
                    })
                })
                .collect(),
        ),
    };
    write_output(args.out.as_deref(), &content)
}
