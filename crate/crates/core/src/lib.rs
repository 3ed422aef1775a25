//! Photon emission from a perfectly reflecting mirror oscillating at
//! frequency `Ω₀` with small amplitude `δq₀`.
//!
//! The field reflected by the moving mirror is described by sideband
//! amplitudes `g_m(ω)` at frequencies `ω − mΩ₀`. Neighbouring sidebands are
//! coupled, which turns the perturbative `Δ^(-1/2)` divergence of the
//! emission rate at the grazing threshold into a `Δ^(1/2)` zero and shifts
//! the resonance to `Δs > 0`.
//!
//! * [`spectral`] — normal wavenumber `K(ω)` on its branch cut, the coupling
//!   function `H(ω)`, and the damped-oscillation lineshape.
//! * [`sideband`] — the truncated tridiagonal system, its solvers, and the
//!   three-sideband closed form.
//! * [`emission`] — the normalised angular emission rate `ρ(Δ, θ)`.
//! * [`resonance`] — analytic and numeric resonance shift.
//! * [`sweeps`] — figure sweeps and truncation-convergence tables.
//! * [`io`], [`cli`] — config files, CSV/JSON output and the command line.
//!
//! Units have `c = 1`; the emission functions work with a unit photon
//! wavenumber, so `Δ = (Ω₀ − k − k∥)/k` and `kδq₀` are the only scales.
//!
//! ```
//! use mirror_dce::emission::{rate_direct, EmissionQuery, Method};
//! use mirror_dce::resonance::delta_s_analytic;
//!
//! let ds = delta_s_analytic(78.0, 0.03).unwrap();
//! assert!((ds - 7.187e-6).abs() < 1e-8);
//!
//! let q = EmissionQuery::new(78.0, 0.03, 1e-3, Method::Truncated(3)).unwrap();
//! assert!(rate_direct(&q).unwrap().rho > 0.0);
//! ```

pub mod cli;
pub mod emission;
pub mod io;
pub mod quadrature;
pub mod resonance;
pub mod sideband;
pub mod spectral;
pub mod sweeps;
