//! Photon emission from the downshifted sideband.
//!
//! A photon of frequency `k` emitted at angle `θ` from the mirror normal is
//! paired with an input vacuum fluctuation at `ω = Ω₀ − k` sharing the same
//! parallel wavevector `k∥ = k sin θ`. The detuning
//!
//! ```text
//! Δ = Ω₀/k − 1 − sin θ
//! ```
//!
//! measures how far that partner is from grazing. Below `Δ = 0` the partner is
//! evanescent and nothing is emitted.
//!
//! Two routes to the angular rate are provided. [`rate_direct`] evaluates the
//! closed expression in `Δ`. [`rate_from_number`] goes through the averaged
//! output number per channel ([`number_average`]) and the phase-space
//! conversion. They agree to rounding.
//!
//! Rates are reported as the dimensionless
//!
//! ```text
//! ρ(Δ; θ, kδq₀) = cos²θ |g₁(k(Δ + sin θ))|² / sqrt(Δ(Δ + 2 sin θ))
//! ```
//!
//! which is `d²R/dk dΩ` divided by `S k²/(2π³)`, with `S` the mirror area.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::sideband::{
    build_system, closed_form_solution, perturbative_solution, solve_tridiagonal,
    SidebandError, DEFAULT_ORDER,
};
use crate::spectral::{kx_branch, ChannelParams, SpectralError};

/// Largest accepted emission angle, in degrees.
pub const MAX_THETA_DEG: f64 = 89.9;

/// `|denominator| / scale` below which a closed-form sample is flagged.
pub const SINGULAR_RATIO: f64 = 1e-12;

/// `(2π³/(S k²)) · S k²/(2π)³`: converts the number average per unit
/// coarse-grained time into the normalized rate.
pub const NUMBER_TO_RATE: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmissionError {
    #[error("emission angle must lie in [0, {MAX_THETA_DEG}] degrees, got {0}")]
    InvalidAngle(f64),
    #[error("k*dq0 must be finite and positive, got {0}")]
    InvalidAmplitude(f64),
    #[error("detuning must be finite, got {0}")]
    InvalidDetuning(f64),
    #[error("detuning must be non-negative, got {0}")]
    NegativeDetuning(f64),
    #[error("normal wavevector component must be positive, got {0}")]
    NonPositiveKx(f64),
    #[error("unknown method '{0}' (expected perturbative, closed-form or truncated[:M])")]
    UnknownMethod(String),
    #[error(transparent)]
    Sideband(#[from] SidebandError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// How `g₁` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Uncoupled sidebands.
    Perturbative,
    /// Three coupled sidebands, closed form.
    ClosedForm,
    /// Numerical solve with `m ∈ [−M, M]`.
    Truncated(usize),
}

impl Method {
    /// Identifier used in column names: `perturbative`, `closed_form`,
    /// `truncated_M`.
    pub fn key(&self) -> String {
        match self {
            Method::Perturbative => "perturbative".to_owned(),
            Method::ClosedForm => "closed_form".to_owned(),
            Method::Truncated(m) => format!("truncated_{m}"),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Perturbative => f.write_str("perturbative"),
            Method::ClosedForm => f.write_str("closed-form"),
            Method::Truncated(m) => write!(f, "truncated:{m}"),
        }
    }
}

impl FromStr for Method {
    type Err = EmissionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "perturbative" => return Ok(Method::Perturbative),
            "closed-form" | "closed_form" | "closedform" => return Ok(Method::ClosedForm),
            "truncated" => return Ok(Method::Truncated(DEFAULT_ORDER)),
            _ => {}
        }
        let order = lower
            .strip_prefix("truncated")
            .map(|rest| rest.trim_start_matches([':', '_', '-', '(']).trim_end_matches(')'))
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|m| *m >= 1);
        order
            .map(Method::Truncated)
            .ok_or_else(|| EmissionError::UnknownMethod(s.to_owned()))
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_angle(theta_deg: f64) -> Result<(), EmissionError> {
    if theta_deg.is_finite() && (0.0..=MAX_THETA_DEG).contains(&theta_deg) {
        Ok(())
    } else {
        Err(EmissionError::InvalidAngle(theta_deg))
    }
}

/// One point of the angular emission spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionQuery {
    pub theta_deg: f64,
    pub k_dq0: f64,
    pub delta: f64,
    pub method: Method,
}

impl EmissionQuery {
    pub fn new(theta_deg: f64, k_dq0: f64, delta: f64, method: Method) -> Result<Self, EmissionError> {
        check_angle(theta_deg)?;
        if !(k_dq0.is_finite() && k_dq0 > 0.0) {
            return Err(EmissionError::InvalidAmplitude(k_dq0));
        }
        if !delta.is_finite() {
            return Err(EmissionError::InvalidDetuning(delta));
        }
        Ok(Self {
            theta_deg,
            k_dq0,
            delta,
            method,
        })
    }

    pub fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Result<Self, EmissionError> {
        Self::new(self.theta_deg, self.k_dq0, delta, self.method)
    }

    pub fn mode(&self) -> ModeContext {
        ModeContext::new(self.theta_deg, self.k_dq0, self.delta)
    }
}

/// Floating-point kinematics of one emission channel at unit photon scale.
///
/// `kx = cos θ`, `k_par = sin θ`, `k = hypot(kx, k_par)` and
/// `Ω₀ = k + k_par + kΔ`. The detuning actually represented by these numbers,
/// [`ModeContext::delta`], can differ from the requested one by about
/// `1e-16` in absolute terms. Every rate is evaluated at the represented
/// value, so both rate routes see identical inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeContext {
    pub k: f64,
    pub kx: f64,
    pub k_par: f64,
    pub omega0: f64,
    pub dq0: f64,
}

impl ModeContext {
    pub fn new(theta_deg: f64, k_dq0: f64, delta: f64) -> Self {
        let (k_par, kx) = theta_deg.to_radians().sin_cos();
        let k = kx.hypot(k_par);
        Self {
            k,
            kx,
            k_par,
            omega0: k + k_par + k * delta,
            dq0: k_dq0 / k,
        }
    }

    /// Frequency of the partner fluctuation, `Ω₀ − k`.
    pub fn partner_frequency(&self) -> f64 {
        self.omega0 - self.k
    }

    /// Represented detuning `(Ω₀ − k − k_par)/k`.
    pub fn delta(&self) -> f64 {
        (self.partner_frequency() - self.k_par) / self.k
    }

    pub fn channel(&self) -> Result<ChannelParams, SpectralError> {
        ChannelParams::new(self.k_par, self.omega0)
    }

    pub fn sin_theta(&self) -> f64 {
        self.k_par / self.k
    }

    pub fn cos_theta(&self) -> f64 {
        self.kx / self.k
    }
}

/// `g₁` at base frequency `omega` and whether the evaluation is near-singular.
pub fn g1_with_flag(
    omega: f64,
    params: &ChannelParams,
    dq0: f64,
    method: Method,
) -> Result<(Complex64, bool), EmissionError> {
    match method {
        Method::Perturbative => Ok((perturbative_solution(omega, params, dq0)?.g1, false)),
        Method::ClosedForm => {
            let cf = closed_form_solution(omega, params, dq0)?;
            let singular = cf.denominator.norm()
                < SINGULAR_RATIO * cf.denominator_scale + cf.denominator_resolution;
            Ok((cf.g1, singular))
        }
        Method::Truncated(order) => {
            let sol = solve_tridiagonal(&build_system(omega, params, dq0, order)?)?;
            Ok((sol.g(1), sol.condition_flag))
        }
    }
}

/// Averaged output photon number per unit coarse-grained time for the
/// channel with normal wavevector `kx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumberAverage {
    pub value: f64,
    pub singular: bool,
}

/// `(4 kx²/k) Θ(Ω₀ − k − k∥) |g₁(Ω₀ − k)|² / K(Ω₀ − k)`, with
/// `k = sqrt(kx² + k∥²)`.
///
/// The threshold is strict: a partner exactly at grazing contributes nothing.
pub fn number_average(
    kx: f64,
    params: &ChannelParams,
    dq0: f64,
    method: Method,
) -> Result<NumberAverage, EmissionError> {
    if !(kx.is_finite() && kx > 0.0) {
        return Err(EmissionError::NonPositiveKx(kx));
    }
    let k = kx.hypot(params.k_par());
    let omega = params.omega0() - k;
    if omega - params.k_par() <= 0.0 || dq0 == 0.0 {
        return Ok(NumberAverage {
            value: 0.0,
            singular: false,
        });
    }
    let partner = kx_branch(omega, params);
    let (g1, singular) = g1_with_flag(omega, params, dq0, method)?;
    Ok(NumberAverage {
        value: 4.0 * kx * kx / k * g1.norm_sqr() / partner.value.re,
        singular,
    })
}

/// Normalized angular rate at one `(Δ, θ, kδq₀)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionSample {
    pub query: EmissionQuery,
    /// Detuning represented in floating point (see [`ModeContext`]).
    pub delta_eff: f64,
    pub rho: f64,
    pub singular: bool,
}

fn below_threshold(query: &EmissionQuery, mode: &ModeContext) -> Option<EmissionSample> {
    let delta_eff = mode.delta();
    (query.delta <= 0.0 || delta_eff <= 0.0).then_some(EmissionSample {
        query: *query,
        delta_eff: delta_eff.min(0.0).max(query.delta.min(0.0)),
        rho: 0.0,
        singular: false,
    })
}

/// `ρ = cos²θ |g₁(k(Δ + sin θ))|² / sqrt(Δ(Δ + 2 sin θ))`, zero for `Δ ≤ 0`.
pub fn rate_direct(query: &EmissionQuery) -> Result<EmissionSample, EmissionError> {
    let mode = query.mode();
    if let Some(zero) = below_threshold(query, &mode) {
        return Ok(zero);
    }
    let params = mode.channel()?;
    let (g1, singular) =
        g1_with_flag(mode.partner_frequency(), &params, mode.dq0, query.method)?;
    Ok(EmissionSample {
        query: *query,
        delta_eff: mode.delta(),
        rho: rate_from_amplitude(&mode, g1),
        singular,
    })
}

/// The rate formula applied to a given amplitude `g₁(Ω₀ − k)`; zero when the
/// represented detuning is not positive.
pub fn rate_from_amplitude(mode: &ModeContext, g1: Complex64) -> f64 {
    let delta = mode.delta();
    if delta <= 0.0 {
        return 0.0;
    }
    let sin = mode.sin_theta();
    let cos = mode.cos_theta();
    cos * cos * g1.norm_sqr() / (delta * (delta + 2.0 * sin)).sqrt()
}

/// Same rate, routed through [`number_average`] and the phase-space factor.
pub fn rate_from_number(query: &EmissionQuery) -> Result<EmissionSample, EmissionError> {
    let mode = query.mode();
    if let Some(zero) = below_threshold(query, &mode) {
        return Ok(zero);
    }
    let params = mode.channel()?;
    let n = number_average(mode.kx, &params, mode.dq0, query.method)?;
    Ok(EmissionSample {
        query: *query,
        delta_eff: mode.delta(),
        rho: NUMBER_TO_RATE * n.value,
        singular: n.singular,
    })
}

/// Leading small-`Δ` form of the partner wavenumber, `k sqrt(2 sin θ Δ)`,
/// at the represented detuning. The exact value is `k sqrt(Δ(Δ + 2 sin θ))`.
pub fn kx_smalldelta_approx(query: &EmissionQuery) -> Result<f64, EmissionError> {
    if query.delta < 0.0 {
        return Err(EmissionError::NegativeDetuning(query.delta));
    }
    if query.delta == 0.0 {
        return Ok(0.0);
    }
    let mode = query.mode();
    Ok(mode.k * (2.0 * mode.sin_theta() * mode.delta().max(0.0)).sqrt())
}

/// Exact partner wavenumber `K(Ω₀ − k)` for the query's represented
/// kinematics; zero at and below threshold.
pub fn partner_wavenumber(query: &EmissionQuery) -> Result<f64, EmissionError> {
    let mode = query.mode();
    let params = mode.channel()?;
    Ok(kx_branch(mode.partner_frequency(), &params).value.re.max(0.0))
}
