//! Command-line front end.
//!
//! Exit codes: `0` success, `2` usage or validation error, `3` numerical
//! failure (no resonance peak, exact singularity, branch point, quadrature
//! that does not converge).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::emission::{rate_direct, EmissionError, EmissionQuery, Method};
use crate::io::{
    check_file, check_precision, convergence_table, resonance_table, sample_table, sweep_table,
    CliConfig, Field, Format, IoError, Table, DEFAULT_PRECISION,
};
use crate::resonance::{delta_s_analytic, delta_s_numeric, ResonanceError, ResonanceResult};
use crate::sideband::{SidebandError, DEFAULT_ORDER};
use crate::spectral::SpectralError;
use crate::sweeps::{
    convergence_report, run_sweep, Grid, Spacing, SweepError, SweepKind, SweepSpec, DEFAULT_K_DQ0,
    DEFAULT_THETA_DEG,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mirror-dce",
    version,
    about = "Photon emission from an oscillating mirror: rates, sweeps and resonance shifts"
)]
struct Cli {
    /// Flat TOML file with defaults for any flag (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Significant digits for numbers, 6..=17.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Truncation order for `truncated` methods and the numeric shift.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Scenario {
    /// Emission angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Dimensionless oscillation amplitude k*dq0.
    #[arg(long = "k-dq0", allow_negative_numbers = true)]
    k_dq0: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalised angular emission rate at one point.
    Rate {
        #[command(flatten)]
        scenario: Scenario,
        /// Normalised detuning (Omega0 - k - k_par)/k.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        /// perturbative, closed-form or truncated[:M].
        #[arg(long)]
        method: Option<String>,
    },
    /// Rate, shift or convergence sweep over a grid.
    Sweep {
        /// figure1, figure1_insert, figure2 or convergence.
        kind: Option<String>,
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, allow_negative_numbers = true)]
        min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        max: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// log or linear.
        #[arg(long)]
        spacing: Option<String>,
        /// Comma-separated methods (rate sweeps).
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Comma-separated truncation orders (convergence sweeps).
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
        /// figure2: also locate the numeric shift at --order.
        #[arg(long)]
        numeric: bool,
    },
    /// Motion-induced shift of the emission resonance.
    Resonance {
        /// Emission angle(s) in degrees, comma-separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta: Option<Vec<f64>>,
        #[arg(long = "k-dq0", allow_negative_numbers = true)]
        k_dq0: Option<f64>,
        /// Also locate the peak of the truncated rate.
        #[arg(long)]
        numeric: bool,
    },
    /// g1, rate and residual versus truncation order at one point.
    Convergence {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
    },
    /// Re-read sweep output and verify row count and grid monotonicity.
    Check { path: PathBuf },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

fn is_numerical_sideband(e: &SidebandError) -> bool {
    matches!(
        e,
        SidebandError::BranchPoint { .. } | SidebandError::DegenerateDrive | SidebandError::Singular { .. }
    )
}

fn is_numerical_spectral(e: &SpectralError) -> bool {
    matches!(e, SpectralError::Quadrature(_))
}

impl From<EmissionError> for Failure {
    fn from(e: EmissionError) -> Self {
        let flag = match &e {
            EmissionError::InvalidAngle(_) => "--theta",
            EmissionError::InvalidAmplitude(_) => "--k-dq0",
            EmissionError::InvalidDetuning(_) | EmissionError::NegativeDetuning(_) => "--delta",
            EmissionError::UnknownMethod(_) => "--method",
            EmissionError::Sideband(s) if is_numerical_sideband(s) => return Failure::numerical(e.to_string()),
            EmissionError::Sideband(SidebandError::InvalidOrder(_)) => "--order",
            EmissionError::Sideband(SidebandError::Relativistic { .. }) => "--k-dq0",
            EmissionError::Spectral(s) if is_numerical_spectral(s) => return Failure::numerical(e.to_string()),
            _ => return Failure::usage(e.to_string()),
        };
        Failure::usage(format!("invalid {flag}: {e}"))
    }
}

impl From<ResonanceError> for Failure {
    fn from(e: ResonanceError) -> Self {
        match e {
            ResonanceError::InvalidAngle(_) => Failure::usage(format!("invalid --theta: {e}")),
            ResonanceError::InvalidAmplitude(_) => Failure::usage(format!("invalid --k-dq0: {e}")),
            ResonanceError::OrderTooLow(_) => Failure::usage(format!("invalid --order: {e}")),
            ResonanceError::NoPeak { .. } | ResonanceError::NoSignChange { .. } => Failure::numerical(e.to_string()),
            ResonanceError::Emission(inner) => inner.into(),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Resonance(inner) => inner.into(),
            SweepError::Sideband(ref s) if is_numerical_sideband(s) => Failure::numerical(e.to_string()),
            SweepError::Spectral(ref s) if is_numerical_spectral(s) => Failure::numerical(e.to_string()),
            SweepError::BadOrders => Failure::usage(format!("invalid --orders: {e}")),
            SweepError::NoMethods => Failure::usage(format!("invalid --methods: {e}")),
            SweepError::UnknownKind(_) => Failure::usage(format!("invalid sweep kind: {e}")),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Precision(_) => Failure::usage(format!("invalid --precision: {e}")),
            IoError::UnknownFormat(_) => Failure::usage(format!("invalid --format: {e}")),
            _ => Failure::usage(e.to_string()),
        }
    }
}

/// Global output settings after merging flags over the config file.
struct Output {
    format: Format,
    out: Option<PathBuf>,
    precision: usize,
    order: usize,
}

impl Output {
    fn emit(&self, table: &Table, stdout: &mut dyn Write) -> Result<(), Failure> {
        match &self.out {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                table.write(&mut w, self.format, self.precision)?;
                w.flush().map_err(IoError::from)?;
            }
            None => table.write(&mut *stdout, self.format, self.precision)?,
        }
        Ok(())
    }
}

fn parse_method(s: &str, order: usize) -> Result<Method, Failure> {
    if s.trim().eq_ignore_ascii_case("truncated") {
        return Ok(Method::Truncated(order));
    }
    s.parse::<Method>().map_err(Failure::from)
}

fn parse_spacing(s: &str) -> Result<Spacing, Failure> {
    match s.trim().to_ascii_lowercase().as_str() {
        "log" => Ok(Spacing::Log),
        "linear" | "lin" => Ok(Spacing::Linear),
        _ => Err(Failure::usage(format!("invalid --spacing: '{s}' (expected log or linear)"))),
    }
}

fn scenario(s: &Scenario, cfg: &CliConfig) -> (f64, f64) {
    (
        s.theta.or(cfg.theta).unwrap_or(DEFAULT_THETA_DEG),
        s.k_dq0.or(cfg.k_dq0).unwrap_or(DEFAULT_K_DQ0),
    )
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    let format = match cli.format.as_deref() {
        Some(f) => f.parse::<Format>()?,
        None => cfg.format.unwrap_or_default(),
    };
    let order = cli.order.or(cfg.order).unwrap_or(DEFAULT_ORDER);
    if order < 1 {
        return Err(Failure::usage("invalid --order: truncation order must be >= 1"));
    }
    let output = Output {
        format,
        out: cli.out.clone().or_else(|| cfg.out.clone()),
        precision: check_precision(cli.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION))?,
        order,
    };

    match cli.command {
        Command::Rate {
            scenario: sc,
            delta,
            method,
        } => {
            let (theta, k_dq0) = scenario(&sc, &cfg);
            let delta = delta
                .or(cfg.delta)
                .ok_or_else(|| Failure::usage("missing --delta"))?;
            let method = match method.or_else(|| cfg.method.clone()) {
                Some(m) => parse_method(&m, output.order)?,
                None => Method::ClosedForm,
            };
            let query = EmissionQuery::new(theta, k_dq0, delta, method)?;
            let sample = rate_direct(&query)?;
            output.emit(&sample_table(&sample), stdout)
        }
        Command::Sweep {
            kind,
            scenario: sc,
            min,
            max,
            count,
            spacing,
            methods,
            orders,
            numeric,
        } => {
            let kind: SweepKind = kind
                .or_else(|| cfg.kind.clone())
                .ok_or_else(|| Failure::usage("missing sweep kind (figure1, figure1_insert, figure2, convergence)"))?
                .parse()?;
            let (theta, k_dq0) = scenario(&sc, &cfg);
            let mut spec = SweepSpec::default_for(kind, theta, k_dq0)?;
            let g = spec.grid;
            let spacing = match spacing.or_else(|| cfg.spacing.clone()) {
                Some(s) => parse_spacing(&s)?,
                None => g.spacing,
            };
            spec.grid = Grid {
                min: min.or(cfg.min).unwrap_or(g.min),
                max: max.or(cfg.max).unwrap_or(g.max),
                count: count.or(cfg.count).unwrap_or(g.count),
                spacing,
            };
            match methods.or_else(|| cfg.methods.clone()) {
                Some(list) => {
                    spec.methods = list
                        .iter()
                        .map(|m| parse_method(m, output.order))
                        .collect::<Result<_, _>>()?;
                }
                None => {
                    for m in &mut spec.methods {
                        if let Method::Truncated(_) = m {
                            *m = Method::Truncated(output.order);
                        }
                    }
                }
            }
            if let Some(o) = orders.or_else(|| cfg.orders.clone()) {
                spec.orders = o;
            }
            if numeric || cfg.numeric.unwrap_or(false) {
                spec.numeric_order = Some(output.order);
            }
            let result = run_sweep(&spec)?;
            output.emit(&sweep_table(&result), stdout)
        }
        Command::Resonance { theta, k_dq0, numeric } => {
            let thetas = theta
                .or_else(|| cfg.theta.map(|t| vec![t]))
                .unwrap_or_else(|| vec![DEFAULT_THETA_DEG]);
            let k_dq0 = k_dq0.or(cfg.k_dq0).unwrap_or(DEFAULT_K_DQ0);
            let numeric = numeric || cfg.numeric.unwrap_or(false);
            let results = thetas
                .iter()
                .map(|&t| {
                    if numeric {
                        delta_s_numeric(t, k_dq0, output.order)
                    } else {
                        delta_s_analytic(t, k_dq0).map(|ds| ResonanceResult {
                            theta_deg: t,
                            k_dq0,
                            delta_s_analytic: ds,
                            delta_s_numeric: None,
                            bracket: None,
                            iterations: 0,
                            order: None,
                            peak_rho: None,
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            output.emit(&resonance_table(&results), stdout)
        }
        Command::Convergence {
            scenario: sc,
            delta,
            orders,
        } => {
            let (theta, k_dq0) = scenario(&sc, &cfg);
            let delta = delta.or(cfg.delta).unwrap_or(1e-3);
            let orders = orders
                .or_else(|| cfg.orders.clone())
                .unwrap_or_else(|| vec![1, 2, 3, 4, 5, 6]);
            let report = convergence_report(theta, k_dq0, delta, &orders)?;
            output.emit(&convergence_table(&report), stdout)
        }
        Command::Check { path } => {
            let explicit = cli.format.as_deref().map(str::parse::<Format>).transpose()?;
            let report = check_file(&path, explicit)?;
            let mut t = Table::new(
                ["format", "axis", "rows", "expected_rows", "monotone", "ok"]
                    .map(String::from)
                    .to_vec(),
            );
            t.rows.push(vec![
                Field::Text(report.format.to_string()),
                Field::Text(report.axis.clone()),
                report.rows.into(),
                report.expected_rows.map_or(Field::Missing, Field::from),
                report.monotone.into(),
                report.ok().into(),
            ]);
            output.emit(&t, stdout)?;
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::usage(format!(
                    "check failed for {}: rows={} expected={:?} monotone={}",
                    path.display(),
                    report.rows,
                    report.expected_rows,
                    report.monotone
                )))
            }
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
