//! Location of the motion-shifted emission resonance `Δs`.
//!
//! The coupled-sideband rate has a pole just inside the emission region,
//! displaced from the static resonance `Δ = 0`. To lowest order in `kδq₀`
//! ([`delta_s_analytic`]):
//!
//! ```text
//! Δs = (kδq₀)⁴/32 · sin³θ (1 + sin θ)⁴ (1/cos θ − 1/sqrt(3 sin²θ + 4 sin θ + 1))²
//! ```
//!
//! [`delta_s_numeric`] finds the argmax of the truncated-system rate instead:
//! a log-spaced scan over two decades either side of the analytic value,
//! then a bracketed ternary refinement that keeps an interior point strictly
//! above both bracket ends. At finite precision the pole shows up as a sharp
//! finite peak, so the argmax is what is compared with the analytic shift.
//!
//! The frequency shift itself is `δΩ = k Δs`.

use serde::Serialize;
use thiserror::Error;

use crate::emission::{rate_direct, EmissionError, EmissionQuery, Method, MAX_THETA_DEG};
use crate::sideband::{closed_form_solution, SidebandError};

/// Coarse scan size.
pub const SCAN_POINTS: usize = 60;
/// Coarse scan spans `Δs_analytic · 10^(±SCAN_DECADES)`.
pub const SCAN_DECADES: f64 = 2.0;
/// Refinement stops once the bracket is narrower than this fraction of the
/// current peak estimate.
pub const REFINE_REL_WIDTH: f64 = 1e-6;
const MAX_REFINE_STEPS: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("emission angle {0} deg outside the resonance domain")]
    InvalidAngle(f64),
    #[error("k*dq0 must be finite and positive, got {0}")]
    InvalidAmplitude(f64),
    #[error("numeric search needs truncation order >= 3, got {0}")]
    OrderTooLow(usize),
    #[error("no interior peak in the scanned window [{lo:e}, {hi:e}]")]
    NoPeak { lo: f64, hi: f64 },
    #[error("closed-form denominator does not change sign on [{lo:e}, {hi:e}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error(transparent)]
    Emission(#[from] EmissionError),
}

/// Resonance shift at one `(θ, kδq₀)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceResult {
    pub theta_deg: f64,
    pub k_dq0: f64,
    pub delta_s_analytic: f64,
    pub delta_s_numeric: Option<f64>,
    /// Final refinement bracket around `delta_s_numeric`.
    pub bracket: Option<(f64, f64)>,
    pub iterations: usize,
    pub order: Option<usize>,
    /// Truncated rate at `delta_s_numeric`.
    pub peak_rho: Option<f64>,
}

impl ResonanceResult {
    /// `δΩ = k Δs` for photon frequency `k`, using the numeric shift when
    /// available.
    pub fn frequency_shift(&self, k: f64) -> f64 {
        k * self.delta_s_numeric.unwrap_or(self.delta_s_analytic)
    }
}

fn check_amplitude(k_dq0: f64) -> Result<(), ResonanceError> {
    if k_dq0.is_finite() && k_dq0 > 0.0 {
        Ok(())
    } else {
        Err(ResonanceError::InvalidAmplitude(k_dq0))
    }
}

/// Lowest-order analytic shift. Defined on `θ ∈ [0°, 90°)`; zero at `θ = 0`.
pub fn delta_s_analytic(theta_deg: f64, k_dq0: f64) -> Result<f64, ResonanceError> {
    if !(theta_deg.is_finite() && (0.0..90.0).contains(&theta_deg)) {
        return Err(ResonanceError::InvalidAngle(theta_deg));
    }
    check_amplitude(k_dq0)?;
    let (s, c) = theta_deg.to_radians().sin_cos();
    let bracket = 1.0 / c - 1.0 / (3.0 * s * s + 4.0 * s + 1.0).sqrt();
    Ok(k_dq0.powi(4) / 32.0 * s.powi(3) * (1.0 + s).powi(4) * bracket * bracket)
}

fn truncated_rho(theta_deg: f64, k_dq0: f64, order: usize, delta: f64) -> Result<f64, ResonanceError> {
    let q = EmissionQuery::new(theta_deg, k_dq0, delta, Method::Truncated(order))?;
    match rate_direct(&q) {
        Ok(s) => Ok(s.rho),
        // landed exactly on the pole
        Err(EmissionError::Sideband(SidebandError::Singular { .. })) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Argmax of the truncated-system rate near the analytic shift.
pub fn delta_s_numeric(theta_deg: f64, k_dq0: f64, order: usize) -> Result<ResonanceResult, ResonanceError> {
    if !(theta_deg.is_finite() && theta_deg > 0.0 && theta_deg <= MAX_THETA_DEG) {
        return Err(ResonanceError::InvalidAngle(theta_deg));
    }
    if order < 3 {
        return Err(ResonanceError::OrderTooLow(order));
    }
    let analytic = delta_s_analytic(theta_deg, k_dq0)?;
    let spread = 10f64.powf(SCAN_DECADES);
    let (lo, hi) = (analytic / spread, analytic * spread);
    let rho = |d: f64| truncated_rho(theta_deg, k_dq0, order, d);

    let grid = log_grid(lo, hi, SCAN_POINTS);
    let values = grid.iter().map(|&d| rho(d)).collect::<Result<Vec<_>, _>>()?;
    let (best, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(ResonanceError::NoPeak { lo, hi });
    }

    let (mut a, mut b, mut c) = (grid[best - 1], grid[best], grid[best + 1]);
    let mut fb = values[best];
    let mut iterations = 0;
    while c - a > REFINE_REL_WIDTH * b && iterations < MAX_REFINE_STEPS && fb.is_finite() {
        iterations += 1;
        let probe_right = c - b > b - a;
        let x = if probe_right { 0.5 * (b + c) } else { 0.5 * (a + b) };
        if x == a || x == b || x == c {
            break;
        }
        let fx = rho(x)?;
        if fx > fb {
            if probe_right {
                a = b;
            } else {
                c = b;
            }
            b = x;
            fb = fx;
        } else if probe_right {
            c = x;
        } else {
            a = x;
        }
    }

    Ok(ResonanceResult {
        theta_deg,
        k_dq0,
        delta_s_analytic: analytic,
        delta_s_numeric: Some(b),
        bracket: Some((a, c)),
        iterations,
        order: Some(order),
        peak_rho: Some(fb),
    })
}

/// Zero of the three-sideband closed-form denominator, by bisection on
/// `[Δs/100, 100 Δs]` around the analytic shift. This is where the
/// closed-form rate is singular.
pub fn closed_form_pole(theta_deg: f64, k_dq0: f64) -> Result<f64, ResonanceError> {
    let analytic = delta_s_analytic(theta_deg, k_dq0)?;
    let denominator = |d: f64| -> Result<f64, ResonanceError> {
        let q = EmissionQuery::new(theta_deg, k_dq0, d, Method::ClosedForm)?;
        let mode = q.mode();
        let params = mode.channel().map_err(EmissionError::from)?;
        let cf = closed_form_solution(mode.partner_frequency(), &params, mode.dq0)
            .map_err(EmissionError::from)?;
        Ok(cf.denominator.re)
    };
    let spread = 10f64.powf(SCAN_DECADES);
    let (mut lo, mut hi) = (analytic / spread, analytic * spread);
    let (mut f_lo, f_hi) = (denominator(lo)?, denominator(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(ResonanceError::NoSignChange { lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = match denominator(mid) {
            Ok(v) => v,
            Err(ResonanceError::Emission(EmissionError::Sideband(SidebandError::Singular { .. }))) => {
                return Ok(mid)
            }
            Err(e) => return Err(e),
        };
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Analytic shift (and the numeric one when `numeric_order` is set) for each
/// angle, in input order. Failures are reported per point.
pub fn shift_vs_angle_sweep(
    k_dq0: f64,
    thetas_deg: &[f64],
    numeric_order: Option<usize>,
) -> Vec<Result<ResonanceResult, ResonanceError>> {
    thetas_deg
        .iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta <= MAX_THETA_DEG) {
                return Err(ResonanceError::InvalidAngle(theta));
            }
            match numeric_order {
                Some(order) => delta_s_numeric(theta, k_dq0, order),
                None => Ok(ResonanceResult {
                    theta_deg: theta,
                    k_dq0,
                    delta_s_analytic: delta_s_analytic(theta, k_dq0)?,
                    delta_s_numeric: None,
                    bracket: None,
                    iterations: 0,
                    order: None,
                    peak_rho: None,
                }),
            }
        })
        .collect()
}
