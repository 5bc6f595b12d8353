//! Command-line front end for the oscillator solvers: closed-form and
//! numerical periods, trajectory exports, Fourier coefficient comparisons,
//! and error scans over the nonlinearity parameter.

use std::fmt;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "anharmonic",
    version,
    about = "Periods, trajectories and Fourier spectra of the quartic anharmonic oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Oscillation period by one or all methods
    Period(PeriodArgs),
    /// Sampled trajectory comparison as CSV or JSON
    Solve(SolveArgs),
    /// Fourier coefficients of the periodic solution
    Fourier(FourierArgs),
    /// Error curves over a logarithmic grid in mu A^2
    Scan(ScanArgs),
}

#[derive(Args)]
struct PeriodArgs {
    /// Quartic coefficient mu of the restoring force x + mu x^3
    #[arg(long)]
    mu: f64,
    /// Release amplitude A
    #[arg(long)]
    amplitude: f64,
    #[arg(long, value_enum, default_value_t = PeriodMethod::All)]
    method: PeriodMethod,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator resolution used by the ode method
    #[arg(long, default_value_t = 1000)]
    ode_steps: u32,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    amplitude: f64,
    /// Time span in units of the stationary first-order period
    #[arg(long, default_value_t = 2.0)]
    periods: f64,
    /// Number of output rows, spaced uniformly including both ends
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Trajectory columns to emit
    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = [SolveMethod::Pms, SolveMethod::Exact, SolveMethod::Ode])]
    methods: Vec<SolveMethod>,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    ode_steps: u32,
}

#[derive(Args)]
struct FourierArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    amplitude: f64,
    /// Highest harmonic index n of c_n; closed-form methods stop at 3
    #[arg(long, default_value_t = 3)]
    order: u32,
    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = [FourierMethod::PmsClosed, FourierMethod::PmsNumeric,
                              FourierMethod::Exact, FourierMethod::Lp])]
    methods: Vec<FourierMethod>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    target: ScanTarget,
    #[arg(long, default_value_t = 1e-3)]
    z_min: f64,
    #[arg(long, default_value_t = 1e8)]
    z_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PeriodMethod {
    Pms,
    Exact,
    Quadrature,
    Ode,
    Lp,
    All,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Pms,
    Exact,
    Ode,
    Lp,
}

impl SolveMethod {
    fn label(self) -> &'static str {
        match self {
            SolveMethod::Pms => "pms",
            SolveMethod::Exact => "exact",
            SolveMethod::Ode => "ode",
            SolveMethod::Lp => "lp",
        }
    }

    fn column(self) -> &'static str {
        match self {
            SolveMethod::Pms => "x_pms",
            SolveMethod::Exact => "x_exact",
            SolveMethod::Ode => "x_ode",
            SolveMethod::Lp => "x_lp",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FourierMethod {
    PmsClosed,
    PmsNumeric,
    Exact,
    Lp,
}

impl FourierMethod {
    fn label(self) -> &'static str {
        match self {
            FourierMethod::PmsClosed => "pms-closed",
            FourierMethod::PmsNumeric => "pms-numeric",
            FourierMethod::Exact => "exact",
            FourierMethod::Lp => "lp",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ScanTarget {
    #[value(name = "c0-error")]
    C0Error,
    #[value(name = "period-error")]
    PeriodError,
}

impl ScanTarget {
    fn label(self) -> &'static str {
        match self {
            ScanTarget::C0Error => "c0-error",
            ScanTarget::PeriodError => "period-error",
        }
    }
}

enum AppError {
    Usage(String),
    Numeric(anharmonic::Error),
    Io(PathBuf, io::Error),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Numeric(_) => 3,
            AppError::Io(..) => 4,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(message) => write!(f, "{message}"),
            AppError::Numeric(source) => write!(f, "computation failed: {source}"),
            AppError::Io(path, source) => {
                write!(f, "cannot write {}: {source}", path.display())
            }
        }
    }
}

impl From<anharmonic::Error> for AppError {
    fn from(source: anharmonic::Error) -> Self {
        AppError::Numeric(source)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Period(args) => commands::period(&args),
        Command::Solve(args) => commands::solve(&args),
        Command::Fourier(args) => commands::fourier(&args),
        Command::Scan(args) => commands::scan(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
