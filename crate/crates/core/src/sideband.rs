//! Coupled-sideband boundary problem for a mirror oscillating as
//! `δq(t) = δq₀ cos Ω₀t`.
//!
//! Scattering at base frequency `ω` feeds sidebands at `ω_m = ω − mΩ₀`. In
//! the long-wavelength limit their amplitudes `g_m(ω)` obey a symmetric
//! tridiagonal system `M g = Y` with
//!
//! ```text
//! M[m][m]   = i K(ω_m)
//! M[m][m+1] = M[m+1][m] = (δq₀/2) H(ω_m)
//! Y[1]      = −(δq₀/2) H(ω)
//! Y[−1]     = −(δq₀/2) H(ω + Ω₀)
//! ```
//!
//! Truncating to `m ∈ [−M, M]` gives a finite system. It is solved here by a
//! complex Thomas sweep ([`solve_tridiagonal`]) and, for validation, by dense
//! partial-pivot elimination ([`solve_dense_oracle`]). The `M = 1` closed
//! form and the uncoupled (perturbative) limit are available directly.

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{h_aux, kx_branch, ChannelParams};

/// Truncation half-width used when none is given.
pub const DEFAULT_ORDER: usize = 3;

/// Pivot magnitude, relative to the largest matrix entry, below which a
/// solution is flagged as near-singular.
pub const PIVOT_RATIO: f64 = 1e-12;

/// Mirror speed `Ω₀ δq₀` above which the build is rejected.
pub const MAX_SPEED: f64 = 0.3;
/// Mirror speed above which a warning is logged.
pub const WARN_SPEED: f64 = 0.1;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SidebandError {
    #[error("truncation order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("oscillation amplitude must be finite and non-negative, got {0}")]
    InvalidAmplitude(f64),
    #[error("base frequency must be finite, got {0}")]
    InvalidFrequency(f64),
    #[error("nonrelativistic assumption violated: omega0 * dq0 = {speed} >= {MAX_SPEED}")]
    Relativistic { speed: f64 },
    #[error("sideband m = {m} sits on the branch point K(omega_m) = 0")]
    BranchPoint { m: i32 },
    #[error("degenerate drive: dq0 * H(omega) = 0 with nonzero amplitude")]
    DegenerateDrive,
    #[error("system is exactly singular (zero pivot at row m = {m})")]
    Singular { m: i32 },
}

/// Truncated sideband system at fixed base frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSystem {
    omega: f64,
    params: ChannelParams,
    dq0: f64,
    order: usize,
    diag: Vec<Complex64>,
    offdiag: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

fn check_amplitude(dq0: f64) -> Result<(), SidebandError> {
    if dq0.is_finite() && dq0 >= 0.0 {
        Ok(())
    } else {
        Err(SidebandError::InvalidAmplitude(dq0))
    }
}

/// Builds the `(2M+1)`-row system for base frequency `omega`.
///
/// Callers always pass the base frequency; sideband frequencies are derived
/// internally.
pub fn build_system(
    omega: f64,
    params: &ChannelParams,
    dq0: f64,
    order: usize,
) -> Result<SidebandSystem, SidebandError> {
    if order < 1 {
        return Err(SidebandError::InvalidOrder(order));
    }
    if !omega.is_finite() {
        return Err(SidebandError::InvalidFrequency(omega));
    }
    check_amplitude(dq0)?;
    let speed = params.omega0() * dq0;
    if speed >= MAX_SPEED {
        return Err(SidebandError::Relativistic { speed });
    }
    if speed > WARN_SPEED {
        log::warn!("mirror speed omega0 * dq0 = {speed} is not small; long-wavelength expansion is marginal");
    }

    let m_max = order as i32;
    let freq = |m: i32| omega - f64::from(m) * params.omega0();
    let diag = (-m_max..=m_max)
        .map(|m| I * kx_branch(freq(m), params).value)
        .collect();
    let offdiag = (-m_max..m_max)
        .map(|m| Complex64::from(0.5 * dq0 * h_aux(freq(m), params)))
        .collect();
    let mut rhs = vec![Complex64::default(); 2 * order + 1];
    rhs[order + 1] = Complex64::from(-0.5 * dq0 * h_aux(omega, params));
    rhs[order - 1] = Complex64::from(-0.5 * dq0 * h_aux(freq(-1), params));

    Ok(SidebandSystem {
        omega,
        params: *params,
        dq0,
        order,
        diag,
        offdiag,
        rhs,
    })
}

impl SidebandSystem {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn dq0(&self) -> f64 {
        self.dq0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Sideband frequency `ω_m = ω − mΩ₀`.
    pub fn sideband_frequency(&self, m: i32) -> f64 {
        self.omega - f64::from(m) * self.params.omega0()
    }

    /// Row index of sideband `m`, if it is retained.
    pub fn index(&self, m: i32) -> Option<usize> {
        let shifted = i64::from(m) + self.order as i64;
        (0..self.dim() as i64)
            .contains(&shifted)
            .then_some(shifted as usize)
    }

    /// Diagonal, row `m` at index `m + M`.
    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    /// Off-diagonal; entry `m + M` couples rows `m` and `m + 1`.
    pub fn offdiag(&self) -> &[Complex64] {
        &self.offdiag
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let mut a = vec![vec![Complex64::default(); n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.offdiag[i];
                a[i + 1][i] = self.offdiag[i];
            }
        }
        a
    }

    fn max_entry(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn residual(&self, g: &[Complex64]) -> f64 {
        self.matvec(g)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn row_label(&self, idx: usize) -> i32 {
        idx as i32 - self.order as i32
    }
}

/// Amplitudes `g_m(ω)` for `m ∈ [−M, M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSolution {
    g: Vec<Complex64>,
    order: usize,
    pub condition_flag: bool,
    /// Max-norm of `M g − Y`.
    pub residual: f64,
}

impl SidebandSolution {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, m: i32) -> Option<Complex64> {
        let shifted = i64::from(m) + self.order as i64;
        usize::try_from(shifted).ok().and_then(|i| self.g.get(i).copied())
    }

    /// `g_m` for `|m| ≤ M`; panics outside the truncation window.
    pub fn g(&self, m: i32) -> Complex64 {
        self.get(m)
            .unwrap_or_else(|| panic!("sideband {m} outside truncation order {}", self.order))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.g
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        let m0 = -(self.order as i32);
        self.g.iter().enumerate().map(move |(i, z)| (m0 + i as i32, *z))
    }

    pub fn max_abs(&self) -> f64 {
        self.g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Thomas sweep for the complex symmetric tridiagonal system.
///
/// An exactly zero pivot is an error. A pivot smaller than
/// [`PIVOT_RATIO`] times the largest entry only sets `condition_flag`, since
/// the resonance search deliberately evaluates close to singular points.
pub fn solve_tridiagonal(system: &SidebandSystem) -> Result<SidebandSolution, SidebandError> {
    let n = system.dim();
    let a = &system.offdiag;
    let b = &system.diag;
    let d = &system.rhs;
    let threshold = PIVOT_RATIO * system.max_entry();
    let mut flagged = false;

    let mut c_prime = vec![Complex64::default(); n];
    let mut d_prime = vec![Complex64::default(); n];
    for i in 0..n {
        let pivot = if i == 0 {
            b[0]
        } else {
            b[i] - a[i - 1] * c_prime[i - 1]
        };
        if pivot == Complex64::default() {
            return Err(SidebandError::Singular {
                m: system.row_label(i),
            });
        }
        flagged |= pivot.norm() < threshold;
        if i + 1 < n {
            c_prime[i] = a[i] / pivot;
        }
        d_prime[i] = if i == 0 {
            d[0] / pivot
        } else {
            (d[i] - a[i - 1] * d_prime[i - 1]) / pivot
        };
    }

    let mut x = d_prime;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c_prime[i] * next;
    }

    let residual = system.residual(&x);
    Ok(SidebandSolution {
        g: x,
        order: system.order,
        condition_flag: flagged,
        residual,
    })
}

/// Dense Gaussian elimination with partial pivoting over the full matrix.
pub fn solve_dense_oracle(system: &SidebandSystem) -> Result<SidebandSolution, SidebandError> {
    let n = system.dim();
    let mut a = system.to_dense();
    let mut b = system.rhs.clone();
    let threshold = PIVOT_RATIO * system.max_entry();
    let mut flagged = false;

    for col in 0..n {
        let (p, _) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot column");
        if a[p][col] == Complex64::default() {
            return Err(SidebandError::Singular {
                m: system.row_label(col),
            });
        }
        flagged |= a[p][col].norm() < threshold;
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == Complex64::default() {
                continue;
            }
            let (upper, lower) = a.split_at_mut(r);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            let v = b[col];
            b[r] -= factor * v;
        }
    }

    let mut x = vec![Complex64::default(); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }

    let residual = system.residual(&x);
    Ok(SidebandSolution {
        g: x,
        order: system.order,
        condition_flag: flagged,
        residual,
    })
}

/// Three-sideband (`m ∈ {−1, 0, 1}`) closed-form amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSolution {
    pub g1: Complex64,
    pub g_minus1: Complex64,
    pub g0: Complex64,
    /// `K(ω) + (δq₀/2)²[H(ω)²/K(ω₁) + H(ω₋₁)²/K(ω₋₁)]`.
    pub denominator: Complex64,
    /// Largest magnitude among the terms summed into `denominator`.
    pub denominator_scale: f64,
    /// Change in `denominator` caused by one rounding step of the base
    /// frequency; a denominator smaller than this is indistinguishable from
    /// zero at double precision.
    pub denominator_resolution: f64,
}

/// Closed-form solution of the `M = 1` system at base frequency `omega`.
pub fn closed_form_solution(
    omega: f64,
    params: &ChannelParams,
    dq0: f64,
) -> Result<ClosedFormSolution, SidebandError> {
    check_amplitude(dq0)?;
    let omega0 = params.omega0();
    let k_up = kx_branch(omega - omega0, params);
    let k_down = kx_branch(omega + omega0, params);
    if k_up.is_zero() {
        return Err(SidebandError::BranchPoint { m: 1 });
    }
    if k_down.is_zero() {
        return Err(SidebandError::BranchPoint { m: -1 });
    }
    let k0 = kx_branch(omega, params).value;
    let (k1, km1) = (k_up.value, k_down.value);
    let h = h_aux(omega, params);
    let hm1 = h_aux(omega + omega0, params);

    let quarter = 0.25 * dq0 * dq0;
    let t1 = quarter * h * h / k1;
    let t2 = quarter * hm1 * hm1 / km1;
    let denominator = k0 + t1 + t2;
    let denominator_scale = k0.norm().max(t1.norm()).max(t2.norm());
    // dK/dω = ω/K dominates the sensitivity near the base branch point
    let denominator_resolution = if k0.norm() > 0.0 {
        f64::EPSILON * omega.abs().max(omega0) * omega.abs() / k0.norm()
    } else {
        0.0
    };

    if dq0 == 0.0 {
        return Ok(ClosedFormSolution {
            g1: Complex64::default(),
            g_minus1: Complex64::default(),
            g0: Complex64::default(),
            denominator,
            denominator_scale,
            denominator_resolution,
        });
    }
    if h == 0.0 {
        return Err(SidebandError::DegenerateDrive);
    }
    if denominator == Complex64::default() {
        return Err(SidebandError::Singular { m: 0 });
    }

    let g1 = 0.5 * I * (k0 / k1) * (dq0 * h) / denominator;
    let g_minus1 = (k1 * hm1) / (km1 * h) * g1;
    // −1 − 2iK(ω₁)g₁/(δq₀H) simplifies to −1 + K(ω)/D; written as below it
    // avoids cancelling against −1 when the coupling terms are small
    let g0 = -(t1 + t2) / denominator;
    Ok(ClosedFormSolution {
        g1,
        g_minus1,
        g0,
        denominator,
        denominator_scale,
        denominator_resolution,
    })
}

/// Uncoupled first-order amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeSolution {
    pub g1: Complex64,
    pub g_minus1: Complex64,
}

/// Drops the off-diagonal coupling: `g_{±1} = (i/2) δq₀ H(ω_{±1∓1}) / K(ω_{±1})`.
pub fn perturbative_solution(
    omega: f64,
    params: &ChannelParams,
    dq0: f64,
) -> Result<PerturbativeSolution, SidebandError> {
    check_amplitude(dq0)?;
    let omega0 = params.omega0();
    let k1 = kx_branch(omega - omega0, params);
    let km1 = kx_branch(omega + omega0, params);
    if k1.is_zero() {
        return Err(SidebandError::BranchPoint { m: 1 });
    }
    if km1.is_zero() {
        return Err(SidebandError::BranchPoint { m: -1 });
    }
    let g1 = 0.5 * I * dq0 * h_aux(omega, params) / k1.value;
    let g_minus1 = 0.5 * I * dq0 * h_aux(omega + omega0, params) / km1.value;
    Ok(PerturbativeSolution { g1, g_minus1 })
}

/// Coefficients of the advanced solution, `f_m = conj(g_m)`.
pub fn advanced_coefficients(solution: &SidebandSolution) -> SidebandSolution {
    SidebandSolution {
        g: solution.g.iter().map(|z| z.conj()).collect(),
        ..solution.clone()
    }
}
