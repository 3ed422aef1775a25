//! Scalar functions of frequency shared by every scattering channel.
//!
//! Units follow `c = 1`: frequencies and wavenumbers both carry inverse
//! length. A channel is fixed by the conserved parallel wavevector `k_par`
//! and the mechanical frequency `omega0` of the mirror.
//!
//! The normal wavenumber [`kx_branch`] is the real-axis limit of
//! `sqrt((ω + i0)² − k_par²)`. Travelling branches carry the sign of `ω`.
//! Evanescent branches are always `+i|K|` so that the field decays away from
//! the mirror for either sign of `ω`; the principal-branch limit would give
//! `−i|K|` for negative `ω`, but that branch never enters the emission rate.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::quadrature::{self, Integral, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("parallel wavevector must be finite and non-negative, got {0}")]
    InvalidParallelWavevector(f64),
    #[error("mechanical frequency must be finite and positive, got {0}")]
    InvalidMechanicalFrequency(f64),
    #[error("damping time must satisfy omega0 * delta_t >= {min}, got {got}")]
    DampingTooShort { min: f64, got: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Conserved parameters of one scattering channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    k_par: f64,
    omega0: f64,
}

impl ChannelParams {
    pub fn new(k_par: f64, omega0: f64) -> Result<Self, SpectralError> {
        if !(k_par.is_finite() && k_par >= 0.0) {
            return Err(SpectralError::InvalidParallelWavevector(k_par));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(SpectralError::InvalidMechanicalFrequency(omega0));
        }
        Ok(Self { k_par, omega0 })
    }

    pub fn k_par(&self) -> f64 {
        self.k_par
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Travelling,
    Evanescent,
    /// `|ω| = k_par`: the grazing branch point.
    Boundary,
}

/// Normal wavenumber `K(ω)` together with the branch it was taken on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    pub value: Complex64,
    pub regime: Regime,
}

impl Wavenumber {
    pub fn is_zero(&self) -> bool {
        self.regime == Regime::Boundary
    }
}

/// Branch-cut normal wavenumber `K(ω)` for the channel `params`.
///
/// The square root is taken of `(|ω| − k_par)(|ω| + k_par)` so that a
/// frequency close to the branch point keeps full relative accuracy whenever
/// `|ω| − k_par` is itself exact.
pub fn kx_branch(omega: f64, params: &ChannelParams) -> Wavenumber {
    let w = omega.abs();
    let kp = params.k_par;
    if w > kp {
        let mag = ((w - kp) * (w + kp)).sqrt();
        Wavenumber {
            value: Complex64::new(mag.copysign(omega), 0.0),
            regime: Regime::Travelling,
        }
    } else if w < kp {
        let mag = ((kp - w) * (kp + w)).sqrt();
        Wavenumber {
            value: Complex64::new(0.0, mag),
            regime: Regime::Evanescent,
        }
    } else {
        Wavenumber {
            value: Complex64::new(0.0, 0.0),
            regime: Regime::Boundary,
        }
    }
}

/// Coupling function `H(ω) = ω Ω₀ − K(ω)²`, real on the whole real axis.
pub fn h_aux(omega: f64, params: &ChannelParams) -> f64 {
    omega * params.omega0 - omega * omega + params.k_par * params.k_par
}

/// Lower bound on `Ω₀ Δt` accepted for the coarse-grained lineshape.
pub const MIN_QUALITY: f64 = 1e3;
/// `Ω₀ Δt` used by [`LineshapeParams::with_default_damping`].
pub const DEFAULT_QUALITY: f64 = 1e6;

/// Lorentzian profile of the mechanical motion, with damping time `delta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineshapeParams {
    omega0: f64,
    delta_t: f64,
}

impl LineshapeParams {
    pub fn new(omega0: f64, delta_t: f64) -> Result<Self, SpectralError> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(SpectralError::InvalidMechanicalFrequency(omega0));
        }
        let quality = omega0 * delta_t;
        if !(quality.is_finite() && quality >= MIN_QUALITY) {
            return Err(SpectralError::DampingTooShort {
                min: MIN_QUALITY,
                got: quality,
            });
        }
        Ok(Self { omega0, delta_t })
    }

    pub fn with_default_damping(omega0: f64) -> Result<Self, SpectralError> {
        Self::new(omega0, DEFAULT_QUALITY / omega0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    /// Half width at half maximum, `1/Δt`.
    pub fn half_width(&self) -> f64 {
        1.0 / self.delta_t
    }
}

/// Lorentzian lineshape `h(Ω)`, normalized to unit area, peak `Δt/π`.
pub fn lineshape(omega: f64, p: &LineshapeParams) -> f64 {
    let gamma = p.half_width();
    let x = omega - p.omega0;
    gamma / (PI * (x * x + gamma * gamma))
}

/// Half width of the quadrature window, in units of `1/Δt`.
pub const WINDOW_HALF_WIDTHS: f64 = 1e3;

fn window(p: &LineshapeParams) -> (f64, f64) {
    let half = WINDOW_HALF_WIDTHS * p.half_width();
    (p.omega0 - half, p.omega0 + half)
}

/// `∫ h(Ω) dΩ` over `Ω₀ ± 10³/Δt` only, without tail correction.
pub fn lineshape_window_integral(p: &LineshapeParams) -> Result<Integral, SpectralError> {
    let (a, b) = window(p);
    Ok(quadrature::integrate(
        |w| lineshape(w, p),
        a,
        b,
        1e-15,
        1e-13,
    )?)
}

/// `∫ h(Ω) dΩ` over the whole line: adaptive quadrature on the window plus
/// the closed-form Lorentzian tails outside it.
pub fn lineshape_integral(p: &LineshapeParams) -> Result<f64, SpectralError> {
    let core = lineshape_window_integral(p)?.value;
    let w = WINDOW_HALF_WIDTHS;
    let tails = 2.0 * (0.5 * PI - w.atan()) / PI;
    Ok(core + tails)
}

/// `∫ h(Ω)² dΩ` over the whole line (equals `Δt/2π`).
pub fn lineshape_square_integral(p: &LineshapeParams) -> Result<f64, SpectralError> {
    let (a, b) = window(p);
    let core = quadrature::integrate(
        |w| {
            let h = lineshape(w, p);
            h * h
        },
        a,
        b,
        0.0,
        1e-13,
    )?
    .value;
    // ∫_W^∞ dx/(1+x²)² = π/4 − (W/(1+W²) + atan W)/2, in the scaled variable
    // x = (Ω − Ω₀)Δt, where h² dΩ = Δt/π² · dx/(1+x²)².
    let w = WINDOW_HALF_WIDTHS;
    let tail = 0.25 * PI - 0.5 * (w / (1.0 + w * w) + w.atan());
    Ok(core + 2.0 * p.delta_t * tail / (PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ch(k_par: f64, omega0: f64) -> ChannelParams {
        ChannelParams::new(k_par, omega0).unwrap()
    }

    #[test]
    fn free_space_travelling() {
        let k = kx_branch(2.0, &ch(0.0, 1.0));
        assert_eq!(k.value, Complex64::new(2.0, 0.0));
        assert_eq!(k.regime, Regime::Travelling);
    }

    #[test]
    fn evanescent_below_cut() {
        let k = kx_branch(0.5, &ch(1.0, 1.0));
        assert_eq!(k.regime, Regime::Evanescent);
        assert_eq!(k.value.re, 0.0);
        assert!((k.value.im - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn negative_frequency_travels_backwards() {
        let k = kx_branch(-2.0, &ch(1.0, 1.0));
        assert_eq!(k.regime, Regime::Travelling);
        assert!((k.value.re + 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(k.value.im, 0.0);
    }

    #[test]
    fn branch_point_is_exact_zero() {
        for w in [1.0, -1.0] {
            let k = kx_branch(w, &ch(1.0, 1.0));
            assert_eq!(k.regime, Regime::Boundary);
            assert_eq!(k.value, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn negative_evanescent_keeps_positive_imaginary_part() {
        let k = kx_branch(-0.5, &ch(1.0, 1.0));
        assert_eq!(k.regime, Regime::Evanescent);
        assert!(k.value.im > 0.0);
    }

    #[test]
    fn h_aux_values() {
        assert_eq!(h_aux(0.0, &ch(1.0, 3.7)), 1.0);
        assert_eq!(h_aux(1.5, &ch(0.0, 1.5)), 0.0);
        assert!((h_aux(0.3, &ch(0.2, 1.5)) - 0.40).abs() < 1e-15);
    }

    #[test]
    fn channel_validation() {
        assert!(ChannelParams::new(-1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 0.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn lineshape_peak() {
        let p = LineshapeParams::with_default_damping(1.0).unwrap();
        let peak = lineshape(1.0, &p);
        assert!((peak - p.delta_t() / PI).abs() <= 1e-15 * peak);
    }

    #[test]
    fn lineshape_rejects_short_damping() {
        assert!(LineshapeParams::new(1.0, 10.0).is_err());
        assert!(LineshapeParams::new(2.0, 500.0).is_ok());
    }

    #[test]
    fn window_integral_close_to_one() {
        let p = LineshapeParams::with_default_damping(1.0).unwrap();
        let v = lineshape_window_integral(&p).unwrap().value;
        assert!((v - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn full_line_identities() {
        for omega0 in [1.0, 2.5, 40.0] {
            let p = LineshapeParams::with_default_damping(omega0).unwrap();
            let one = lineshape_integral(&p).unwrap();
            assert!((one - 1.0).abs() < 1e-6, "{one}");
            let sq = lineshape_square_integral(&p).unwrap();
            let expected = p.delta_t() / (2.0 * PI);
            assert!(((sq - expected) / expected).abs() < 1e-6, "{sq} vs {expected}");
        }
    }

    proptest! {
        #[test]
        fn square_is_branch_independent(w in -10.0f64..10.0, kp in 0.0f64..10.0) {
            let k = kx_branch(w, &ch(kp, 1.0));
            let sq = k.value * k.value;
            let expected = w * w - kp * kp;
            let scale = (w * w).max(kp * kp).max(1e-300);
            prop_assert!((sq.re - expected).abs() <= 4.0 * f64::EPSILON * scale);
            prop_assert!(sq.im.abs() <= 4.0 * f64::EPSILON * scale);
        }

        #[test]
        fn parity(w in 0.0f64..10.0, kp in 0.0f64..10.0) {
            let p = ch(kp, 1.0);
            let plus = kx_branch(w, &p);
            let minus = kx_branch(-w, &p);
            match plus.regime {
                Regime::Travelling => prop_assert_eq!(minus.value, -plus.value),
                _ => prop_assert_eq!(minus.value, plus.value),
            }
        }

        #[test]
        fn lineshape_is_symmetric(x in 0.0f64..1e-3) {
            let p = LineshapeParams::with_default_damping(1.0).unwrap();
            let a = lineshape(1.0 + x, &p);
            let b = lineshape(1.0 - x, &p);
            prop_assert!((a - b).abs() <= 1e-9 * a.max(b));
        }
    }
}
