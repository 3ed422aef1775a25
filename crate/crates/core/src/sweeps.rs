//! Parameter sweeps behind the emission-rate and resonance-shift figures,
//! plus truncation-convergence tables.
//!
//! Every grid point is evaluated independently and rows come back in grid
//! order, so identical specs give bit-identical rows. A point that fails to
//! evaluate is recorded with an `error` flag and a NaN value; the sweep
//! itself never aborts mid-grid.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emission::{rate_direct, rate_from_amplitude, EmissionQuery, Method, ModeContext};
use crate::resonance::{closed_form_pole, delta_s_analytic, delta_s_numeric, ResonanceError};
use crate::sideband::{build_system, solve_tridiagonal, SidebandError};
use crate::spectral::SpectralError;

/// Default scenario: emission angle (degrees).
pub const DEFAULT_THETA_DEG: f64 = 78.0;
/// Default scenario: `k δq₀`.
pub const DEFAULT_K_DQ0: f64 = 0.03;

/// Grid points closer than this (relative) to a singular location are moved.
pub const NUDGE_WINDOW: f64 = 1e-9;
/// Relative size of that move.
pub const NUDGE_STEP: f64 = 1e-6;
/// Successive relative change below which a truncation order counts as
/// converged.
pub const CONVERGENCE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid bounds [{min}, {max}] are not finite and increasing")]
    BadBounds { min: f64, max: f64 },
    #[error("log spacing needs a positive lower bound, got {0}")]
    NonPositiveLogBound(f64),
    #[error("insert grid [{min:e}, {max:e}] does not straddle the shift {delta_s:e}")]
    InsertMissesShift { min: f64, max: f64, delta_s: f64 },
    #[error("no methods requested")]
    NoMethods,
    #[error("orders must be non-empty, >= 1 and strictly ascending")]
    BadOrders,
    #[error("unknown sweep kind '{0}' (expected figure1, figure1_insert, figure2 or convergence)")]
    UnknownKind(String),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Sideband(#[from] SidebandError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Figure1,
    Figure1Insert,
    Figure2,
    Convergence,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Figure1 => "figure1",
            SweepKind::Figure1Insert => "figure1_insert",
            SweepKind::Figure2 => "figure2",
            SweepKind::Convergence => "convergence",
        }
    }

    /// Name of the grid coordinate column.
    pub fn axis(&self) -> &'static str {
        match self {
            SweepKind::Figure2 => "theta_deg",
            _ => "delta",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "figure1" | "fig1" => Ok(SweepKind::Figure1),
            "figure1_insert" | "fig1_insert" | "insert" => Ok(SweepKind::Figure1Insert),
            "figure2" | "fig2" => Ok(SweepKind::Figure2),
            "convergence" => Ok(SweepKind::Convergence),
            _ => Err(SweepError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self, SweepError> {
        let g = Grid {
            min,
            max,
            count,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.count < 2 {
            return Err(SweepError::TooFewPoints(self.count));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(SweepError::BadBounds {
                min: self.min,
                max: self.max,
            });
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(SweepError::NonPositiveLogBound(self.min));
        }
        Ok(())
    }

    /// Grid points, with both end points hit exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// What to sweep and how.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub theta_deg: f64,
    pub k_dq0: f64,
    pub grid: Grid,
    /// Rate methods (emission sweeps).
    pub methods: Vec<Method>,
    /// Truncation orders (convergence sweeps).
    pub orders: Vec<usize>,
    /// Also locate the numeric shift at this order (`figure2` only).
    pub numeric_order: Option<usize>,
}

impl SweepSpec {
    /// Defaults for `kind` at the given scenario.
    ///
    /// * `figure1`: `Δ ∈ [1e-8, 1e-3]`, 400 log points; perturbative,
    ///   closed form and truncated(3).
    /// * `figure1_insert`: `Δ ∈ [Δs/2, 2Δs]` around the analytic shift,
    ///   201 log points; closed form and truncated(3).
    /// * `figure2`: `θ ∈ [1°, 89°]`, 89 linear points; analytic shift.
    /// * `convergence`: `Δ ∈ [1e-8, 1e-3]`, 20 log points; orders 1, 3, 6.
    pub fn default_for(kind: SweepKind, theta_deg: f64, k_dq0: f64) -> Result<Self, SweepError> {
        let fig1_methods = vec![Method::Perturbative, Method::ClosedForm, Method::Truncated(3)];
        let (grid, methods, orders) = match kind {
            SweepKind::Figure1 => (Grid::new(1e-8, 1e-3, 400, Spacing::Log)?, fig1_methods, vec![]),
            SweepKind::Figure1Insert => {
                let ds = delta_s_analytic(theta_deg, k_dq0)?;
                (
                    Grid::new(0.5 * ds, 2.0 * ds, 201, Spacing::Log)?,
                    vec![Method::ClosedForm, Method::Truncated(3)],
                    vec![],
                )
            }
            SweepKind::Figure2 => (Grid::new(1.0, 89.0, 89, Spacing::Linear)?, vec![], vec![]),
            SweepKind::Convergence => (Grid::new(1e-8, 1e-3, 20, Spacing::Log)?, vec![], vec![1, 3, 6]),
        };
        Ok(SweepSpec {
            kind,
            theta_deg,
            k_dq0,
            grid,
            methods,
            orders,
            numeric_order: None,
        })
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.grid.validate()?;
        match self.kind {
            SweepKind::Figure1 | SweepKind::Figure1Insert => {
                if self.methods.is_empty() {
                    return Err(SweepError::NoMethods);
                }
                // surfaces angle/amplitude problems before any work is done
                EmissionQuery::new(self.theta_deg, self.k_dq0, self.grid.min, Method::Perturbative)
                    .map_err(ResonanceError::from)?;
                if self.kind == SweepKind::Figure1Insert {
                    let ds = delta_s_analytic(self.theta_deg, self.k_dq0)?;
                    if !(self.grid.min < ds && ds < self.grid.max) {
                        return Err(SweepError::InsertMissesShift {
                            min: self.grid.min,
                            max: self.grid.max,
                            delta_s: ds,
                        });
                    }
                }
            }
            SweepKind::Figure2 => {
                if !(self.k_dq0.is_finite() && self.k_dq0 > 0.0) {
                    return Err(ResonanceError::InvalidAmplitude(self.k_dq0).into());
                }
                if let Some(order) = self.numeric_order {
                    if order < 3 {
                        return Err(ResonanceError::OrderTooLow(order).into());
                    }
                }
            }
            SweepKind::Convergence => {
                let ascending = self.orders.windows(2).all(|w| w[0] < w[1]);
                if self.orders.is_empty() || self.orders[0] < 1 || !ascending {
                    return Err(SweepError::BadOrders);
                }
                EmissionQuery::new(self.theta_deg, self.k_dq0, self.grid.min, Method::Perturbative)
                    .map_err(ResonanceError::from)?;
            }
        }
        Ok(())
    }

    /// Value column names, in output order.
    pub fn columns(&self) -> Vec<String> {
        match self.kind {
            SweepKind::Figure1 | SweepKind::Figure1Insert => {
                self.methods.iter().map(|m| format!("rho_{}", m.key())).collect()
            }
            SweepKind::Convergence => self.orders.iter().map(|m| format!("rho_truncated_{m}")).collect(),
            SweepKind::Figure2 => {
                let mut c = vec!["delta_s_analytic".to_string()];
                if let Some(order) = self.numeric_order {
                    c.push(format!("delta_s_numeric_{order}"));
                }
                c
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellFlag {
    Ok,
    /// Near-singular evaluation; the value is the computed quotient.
    Singular,
    /// Grid point was moved off a singular location.
    Nudged,
    /// Evaluation failed; the value is NaN.
    Error,
}

impl CellFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellFlag::Ok => "ok",
            CellFlag::Singular => "singular",
            CellFlag::Nudged => "nudged",
            CellFlag::Error => "error",
        }
    }
}

impl fmt::Display for CellFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CellFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(CellFlag::Ok),
            "singular" => Ok(CellFlag::Singular),
            "nudged" => Ok(CellFlag::Nudged),
            "error" => Ok(CellFlag::Error),
            other => Err(format!("unknown flag '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: f64,
    pub flag: CellFlag,
}

impl Cell {
    fn error() -> Self {
        Cell {
            value: f64::NAN,
            flag: CellFlag::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Grid coordinate (`Δ`, or `θ` in degrees), after any nudge.
    pub x: f64,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub version: String,
    pub determinism: String,
    pub wall_time_s: f64,
}

impl SweepMeta {
    fn new(wall_time_s: f64) -> Self {
        SweepMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            determinism: "seed-free; rows depend only on the sweep parameters".to_string(),
            wall_time_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub meta: SweepMeta,
}

impl SweepResult {
    /// Values of one column, in grid order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.cells[j].value).collect())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.x).collect()
    }
}

fn rate_cell(theta_deg: f64, k_dq0: f64, delta: f64, method: Method) -> Cell {
    match EmissionQuery::new(theta_deg, k_dq0, delta, method).and_then(|q| rate_direct(&q)) {
        Ok(s) => Cell {
            value: s.rho,
            flag: if s.singular { CellFlag::Singular } else { CellFlag::Ok },
        },
        Err(e) => {
            log::debug!("rate at delta={delta:e} ({method}) failed: {e}");
            Cell::error()
        }
    }
}

/// Moves `x` off any location in `hazards` it sits within [`NUDGE_WINDOW`]
/// of; returns the (possibly moved) point and whether it moved.
fn nudge(x: f64, hazards: &[f64]) -> (f64, bool) {
    if hazards.iter().any(|&h| (x - h).abs() <= NUDGE_WINDOW * h.abs()) {
        (x * (1.0 + NUDGE_STEP), true)
    } else {
        (x, false)
    }
}

fn singular_locations(spec: &SweepSpec) -> Vec<f64> {
    let mut out = Vec::new();
    if let Ok(ds) = delta_s_analytic(spec.theta_deg, spec.k_dq0) {
        out.push(ds);
    }
    if spec.methods.contains(&Method::ClosedForm) {
        if let Ok(pole) = closed_form_pole(spec.theta_deg, spec.k_dq0) {
            out.push(pole);
        }
    }
    out
}

fn rate_rows(spec: &SweepSpec, methods: &[Method]) -> Vec<SweepRow> {
    let hazards = singular_locations(spec);
    spec.grid
        .points()
        .into_iter()
        .map(|x| {
            let (x, moved) = nudge(x, &hazards);
            let cells = methods
                .iter()
                .map(|&m| {
                    let mut c = rate_cell(spec.theta_deg, spec.k_dq0, x, m);
                    if moved && c.flag == CellFlag::Ok {
                        c.flag = CellFlag::Nudged;
                    }
                    c
                })
                .collect();
            SweepRow { x, cells }
        })
        .collect()
}

fn shift_rows(spec: &SweepSpec) -> Vec<SweepRow> {
    spec.grid
        .points()
        .into_iter()
        .map(|theta| {
            let mut cells = vec![match delta_s_analytic(theta, spec.k_dq0) {
                Ok(v) => Cell {
                    value: v,
                    flag: CellFlag::Ok,
                },
                Err(_) => Cell::error(),
            }];
            if let Some(order) = spec.numeric_order {
                cells.push(
                    match delta_s_numeric(theta, spec.k_dq0, order).map(|r| r.delta_s_numeric) {
                        Ok(Some(v)) => Cell {
                            value: v,
                            flag: CellFlag::Ok,
                        },
                        _ => Cell::error(),
                    },
                );
            }
            SweepRow { x: theta, cells }
        })
        .collect()
}

/// Evaluates every grid point of `spec`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let start = Instant::now();
    let rows = match spec.kind {
        SweepKind::Figure1 | SweepKind::Figure1Insert => rate_rows(spec, &spec.methods),
        SweepKind::Convergence => {
            let methods: Vec<Method> = spec.orders.iter().map(|&m| Method::Truncated(m)).collect();
            rate_rows(spec, &methods)
        }
        SweepKind::Figure2 => shift_rows(spec),
    };
    Ok(SweepResult {
        spec: spec.clone(),
        columns: spec.columns(),
        rows,
        meta: SweepMeta::new(start.elapsed().as_secs_f64()),
    })
}

/// One truncation order of a [`ConvergenceReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub order: usize,
    pub g1: Complex64,
    pub rho: f64,
    pub residual: f64,
    /// `|g₁(M) − g₁(previous M)| / |g₁(M)|`; `None` for the first order.
    pub change: Option<f64>,
    pub condition_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub theta_deg: f64,
    pub k_dq0: f64,
    pub delta: f64,
    pub rows: Vec<ConvergenceRow>,
    /// First order whose change from the previous one is below
    /// [`CONVERGENCE_TOL`].
    pub converged_at: Option<usize>,
}

/// `g₁`, rate and residual at each truncation order for one point.
/// `k_dq0 = 0` (a static mirror) is allowed and gives all-zero rows.
pub fn convergence_report(
    theta_deg: f64,
    k_dq0: f64,
    delta: f64,
    orders: &[usize],
) -> Result<ConvergenceReport, SweepError> {
    let ascending = orders.windows(2).all(|w| w[0] < w[1]);
    if orders.is_empty() || orders[0] < 1 || !ascending {
        return Err(SweepError::BadOrders);
    }
    if !(k_dq0.is_finite() && k_dq0 >= 0.0) {
        return Err(ResonanceError::InvalidAmplitude(k_dq0).into());
    }
    // angle and detuning validation only; the amplitude may be zero here
    EmissionQuery::new(theta_deg, 1.0, delta, Method::Truncated(orders[0])).map_err(ResonanceError::from)?;

    let mode = ModeContext::new(theta_deg, k_dq0, delta);
    let params = mode.channel()?;
    let omega = mode.partner_frequency();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(orders.len());
    for &order in orders {
        let sol = solve_tridiagonal(&build_system(omega, &params, mode.dq0, order)?)?;
        let g1 = sol.g(1);
        let change = rows.last().map(|prev| {
            let scale = g1.norm();
            if scale == 0.0 {
                (g1 - prev.g1).norm()
            } else {
                (g1 - prev.g1).norm() / scale
            }
        });
        rows.push(ConvergenceRow {
            order,
            g1,
            rho: rate_from_amplitude(&mode, g1),
            residual: sol.residual,
            change,
            condition_flag: sol.condition_flag,
        });
    }
    let converged_at = rows
        .iter()
        .find(|r| r.change.is_some_and(|c| c < CONVERGENCE_TOL))
        .map(|r| r.order);
    Ok(ConvergenceReport {
        theta_deg,
        k_dq0,
        delta,
        rows,
        converged_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> SweepSpec {
        SweepSpec::default_for(SweepKind::Figure1, DEFAULT_THETA_DEG, DEFAULT_K_DQ0).unwrap()
    }

    #[test]
    fn grid_endpoints_and_spacing() {
        let g = Grid::new(1e-8, 1e-3, 6, Spacing::Log).unwrap();
        let p = g.points();
        assert_eq!(p[0], 1e-8);
        assert_eq!(p[5], 1e-3);
        for w in p.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-12);
        }
        assert!(Grid::new(0.0, 1.0, 5, Spacing::Log).is_err());
        assert!(Grid::new(1.0, 0.0, 5, Spacing::Linear).is_err());
        assert!(Grid::new(0.0, 1.0, 1, Spacing::Linear).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("figure1".parse::<SweepKind>().unwrap(), SweepKind::Figure1);
        assert_eq!("figure1-insert".parse::<SweepKind>().unwrap(), SweepKind::Figure1Insert);
        assert_eq!("FIG2".parse::<SweepKind>().unwrap(), SweepKind::Figure2);
        assert!("figure3".parse::<SweepKind>().is_err());
    }

    #[test]
    fn figure1_defaults_and_shape() {
        let r = run_sweep(&fig1()).unwrap();
        assert_eq!(r.rows.len(), 400);
        assert_eq!(r.columns, ["rho_perturbative", "rho_closed_form", "rho_truncated_3"]);
        let pert = r.column("rho_perturbative").unwrap();
        let closed = r.column("rho_closed_form").unwrap();
        // perturbative grows toward the low end of the grid, the exact rate decays
        assert!(pert[0] > pert[10] && pert[10] > pert[40]);
        assert!(closed[0] < closed[10] && closed[10] < closed[40]);
        assert!(r.rows.iter().all(|row| row.cells.iter().all(|c| c.value.is_finite())));
    }

    #[test]
    fn figure2_defaults() {
        let spec = SweepSpec::default_for(SweepKind::Figure2, DEFAULT_THETA_DEG, DEFAULT_K_DQ0).unwrap();
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 89);
        assert_eq!(r.columns, ["delta_s_analytic"]);
        assert_eq!(r.rows[0].x, 1.0);
        assert_eq!(r.rows[88].x, 89.0);
        let v = r.column("delta_s_analytic").unwrap();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn insert_must_straddle_shift() {
        let mut spec = SweepSpec::default_for(SweepKind::Figure1Insert, 78.0, 0.03).unwrap();
        assert!(spec.validate().is_ok());
        spec.grid = Grid::new(1e-4, 1e-3, 10, Spacing::Log).unwrap();
        assert!(matches!(spec.validate(), Err(SweepError::InsertMissesShift { .. })));
    }

    #[test]
    fn determinism() {
        let spec = fig1();
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.x.to_bits(), rb.x.to_bits());
            for (ca, cb) in ra.cells.iter().zip(&rb.cells) {
                assert_eq!(ca.value.to_bits(), cb.value.to_bits());
                assert_eq!(ca.flag, cb.flag);
            }
        }
    }

    #[test]
    fn column_independence() {
        let mut small = fig1();
        small.grid = Grid::new(1e-7, 1e-3, 25, Spacing::Log).unwrap();
        small.methods = vec![Method::ClosedForm];
        let mut big = small.clone();
        big.methods = vec![Method::Truncated(5), Method::ClosedForm, Method::Perturbative];
        let a = run_sweep(&small).unwrap().column("rho_closed_form").unwrap();
        let b = run_sweep(&big).unwrap().column("rho_closed_form").unwrap();
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn grid_point_on_the_shift_is_nudged() {
        let ds = delta_s_analytic(78.0, 0.03).unwrap();
        let mut spec = fig1();
        spec.grid = Grid::new(ds, 2.0 * ds, 3, Spacing::Linear).unwrap();
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows[0].x, ds * (1.0 + NUDGE_STEP));
        assert!(r.rows[0].cells.iter().all(|c| c.flag == CellFlag::Nudged));
        assert!(r.rows[1].cells.iter().all(|c| c.flag == CellFlag::Ok));
    }

    #[test]
    fn failures_stay_in_their_cell() {
        let mut spec = fig1();
        spec.grid = Grid::new(1e-6, 1e-3, 4, Spacing::Log).unwrap();
        // mirror speed Ω₀δq₀ ≈ 0.4: the truncated solve refuses it
        spec.k_dq0 = 0.2;
        spec.methods = vec![Method::Truncated(3), Method::Perturbative];
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.rows.iter().all(|row| row.cells[0].flag == CellFlag::Error && row.cells[0].value.is_nan()));
        assert!(r.rows.iter().all(|row| row.cells[1].flag == CellFlag::Ok));
    }

    #[test]
    fn convergence_static_mirror_is_zero() {
        let rep = convergence_report(78.0, 0.0, 1e-3, &[1, 3, 6]).unwrap();
        assert_eq!(rep.rows.len(), 3);
        for row in &rep.rows {
            assert_eq!(row.g1, Complex64::default());
            assert_eq!(row.rho, 0.0);
        }
    }

    #[test]
    fn convergence_orders_ordering() {
        let rep = convergence_report(78.0, 0.03, 1e-3, &[1, 3, 6]).unwrap();
        let c13 = rep.rows[1].change.unwrap();
        let c36 = rep.rows[2].change.unwrap();
        assert!(rep.rows[0].change.is_none());
        assert!(c36 < c13, "{c36} vs {c13}");
        assert!(convergence_report(78.0, 0.03, 1e-3, &[3, 1]).is_err());
        assert!(convergence_report(78.0, 0.03, 1e-3, &[]).is_err());
    }

    #[test]
    fn convergence_matches_rates() {
        let rep = convergence_report(78.0, 0.03, 1e-4, &[3]).unwrap();
        let q = EmissionQuery::new(78.0, 0.03, 1e-4, Method::Truncated(3)).unwrap();
        assert_eq!(rep.rows[0].rho, rate_direct(&q).unwrap().rho);
    }

    #[test]
    fn peak_position_depends_on_order_near_shift() {
        let mut s = SweepSpec::default_for(SweepKind::Figure1Insert, 78.0, 0.03).unwrap();
        // the two peaks are ~0.3% apart, finer than the default insert grid
        s.grid = Grid::new(7.15e-6, 7.2e-6, 501, Spacing::Linear).unwrap();
        s.methods = vec![Method::Truncated(1), Method::Truncated(3)];
        let r = run_sweep(&s).unwrap();
        let argmax = |v: Vec<f64>| {
            v.iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0
        };
        let i1 = argmax(r.column("rho_truncated_1").unwrap());
        let i3 = argmax(r.column("rho_truncated_3").unwrap());
        assert!(i1 > i3, "order-1 peak at {i1}, order-3 at {i3}");
    }
}
