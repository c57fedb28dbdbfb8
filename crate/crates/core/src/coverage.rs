//! Max-SINR coverage probability of the typical user.
//!
//! With Rayleigh fading and `g(√x) = b·x^(−α/2)`, the interference integral
//! inside the exponent reduces in closed form:
//!
//! ```text
//! ∫₀^∞ πγ g(√x) / (g(√r) + γ g(√x)) dx = r · γ^(2/α) · C(α)
//! ```
//!
//! so the exact coverage is a single semi-infinite integral,
//! `P_cov = πλ_b ∫₀^∞ exp(−q(r)) dr`, with
//! `q(r) = γσ² r^(α/2) / (P b) + λ_b r γ^(2/α) C(α)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::network::{self, NetworkParams};
use crate::quadrature::{self, QuadConfig};

/// A network plus the transmit power the coverage is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageQuery {
    pub params: NetworkParams,
    /// Transmit power `P` in W.
    pub transmit_power: f64,
    c_alpha: f64,
}

impl CoverageQuery {
    pub fn new(params: NetworkParams, transmit_power: f64) -> Result<Self> {
        params.validate().into_result()?;
        if !(transmit_power > 0.0) || !transmit_power.is_finite() {
            return Err(Error::param(
                "transmit_power",
                format!("{transmit_power} must be positive and finite"),
            ));
        }
        Ok(CoverageQuery {
            params,
            transmit_power,
            c_alpha: network::c_alpha(params.alpha)?,
        })
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// Coefficient of `r` in `q`: `λ_b γ^(2/α) C(α)`.
    fn interference_rate(&self) -> f64 {
        let p = &self.params;
        p.lambda_b * p.gamma.powf(2.0 / p.alpha) * self.c_alpha
    }

    /// Coefficient of `r^(α/2)` in `q`: `γσ²/(P b)`.
    fn noise_rate(&self) -> f64 {
        let p = &self.params;
        p.gamma * p.sigma_sq() / (self.transmit_power * p.b)
    }
}

/// Exponent `q(P, λ_b, r)` of the coverage integrand, for `r ≥ 0`.
pub fn q_function(query: &CoverageQuery, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    if r == 0.0 {
        return 0.0;
    }
    let noise = query.noise_rate();
    let noise_term = if noise == 0.0 {
        0.0
    } else {
        noise * r.powf(query.params.alpha / 2.0)
    };
    noise_term + query.interference_rate() * r
}

/// Default absolute tolerance on the coverage probability.
pub const COVERAGE_ABS_TOL: f64 = 1e-9;

/// Exact coverage by adaptive quadrature, absolute tolerance [`COVERAGE_ABS_TOL`].
pub fn coverage_exact(query: &CoverageQuery) -> Result<f64> {
    coverage_exact_with(query, &QuadConfig::default().with_abs_tol(COVERAGE_ABS_TOL))
}

/// Exact coverage with an explicit quadrature configuration. `cfg.abs_tol`
/// is the tolerance on the returned probability.
pub fn coverage_exact_with(query: &CoverageQuery, cfg: &QuadConfig) -> Result<f64> {
    let lambda_b = query.params.lambda_b;
    // Integrate in units of the interference decay length so the integrand
    // is O(1) regardless of the density.
    let scale = 1.0 / query.interference_rate();
    let prefactor = PI * lambda_b * scale;
    let inner_cfg = QuadConfig {
        abs_tol: cfg.abs_tol / prefactor,
        ..*cfg
    };
    let integral = quadrature::integrate_semi_infinite(
        |t| (-q_function(query, scale * t)).exp(),
        0.0,
        &inner_cfg,
    )?;
    let value = prefactor * integral.value;
    let tol = cfg.abs_tol.max(prefactor * integral.error);
    Ok(clamp_within(value, tol))
}

fn clamp_within(value: f64, tol: f64) -> f64 {
    if value < 0.0 && value >= -tol {
        0.0
    } else if value > 1.0 && value <= 1.0 + tol {
        1.0
    } else {
        value
    }
}

/// Noise-free coverage `P_cov^NN = π γ^(−2/α) / C(α)`.
///
/// `params.alpha` must lie in the modeled range; out-of-range exponents
/// give NaN.
pub fn coverage_nn(params: &NetworkParams) -> f64 {
    match network::c_alpha(params.alpha) {
        Ok(c) => PI * params.gamma.powf(-2.0 / params.alpha) / c,
        Err(_) => f64::NAN,
    }
}

/// Result of the first-order low-noise approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowNoiseCoverage {
    pub value: f64,
    /// Set when the linear correction has pushed the value below zero,
    /// i.e. the approximation no longer describes a probability.
    pub breakdown: bool,
}

/// Noise correction coefficient `A′·λ_b^(1−α/2)/P` of the low-noise form.
pub fn lownoise_correction(query: &CoverageQuery) -> Result<f64> {
    let p = &query.params;
    let a_prime = network::a_prime(p.alpha, p.beta(), p.b)?;
    Ok(a_prime * p.lambda_b.powf(1.0 - p.alpha / 2.0) / query.transmit_power)
}

/// `P_cov^NN · (1 − A′ λ_b^(1−α/2) / P)`, returned unclamped.
pub fn coverage_lownoise(query: &CoverageQuery) -> Result<LowNoiseCoverage> {
    let value = coverage_nn(&query.params) * (1.0 - lownoise_correction(query)?);
    Ok(LowNoiseCoverage {
        value,
        breakdown: value < 0.0,
    })
}

/// Minimal BS density meeting `P_cov ≥ P_cov^NN`: `A · P^(−2/(α−2))`.
pub fn optimal_density(params: &NetworkParams, transmit_power: f64) -> Result<f64> {
    if !(transmit_power > 0.0) {
        return Err(Error::param(
            "transmit_power",
            format!("{transmit_power} must be positive"),
        ));
    }
    let a = params.derive()?.a;
    Ok(density_at_bound(a, params.alpha, transmit_power))
}

/// `A · P^(−2/(α−2))` for an explicit bound constant `A`.
pub fn density_at_bound(a: f64, alpha: f64, transmit_power: f64) -> f64 {
    a * transmit_power.powf(-2.0 / (alpha - 2.0))
}
