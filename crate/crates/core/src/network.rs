//! System-model parameters: BS/user densities, pathloss, SINR threshold and
//! noise, plus the constants every other module derives from them.

use std::f64::consts::PI;
use std::fmt;

use statrs::function::gamma::gamma;

use crate::coverage;
use crate::error::{Error, Result};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Largest pathloss exponent accepted. Beyond this `2π/α → 0` and
/// `csc(2π/α)` is dominated by rounding.
pub const MAX_ALPHA: f64 = 200.0;

/// Background noise, either from physical constituents or as a direct `β`.
///
/// The noise variance seen by the typical user is `σ² = β·λ_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Physical {
        /// Total bandwidth `B` in Hz.
        bandwidth: f64,
        /// Receiver noise figure `F`, linear.
        noise_figure: f64,
        /// Boltzmann constant `k` in J/K.
        boltzmann: f64,
        /// Ambient temperature `T` in K.
        temperature: f64,
    },
    Beta(f64),
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel::Beta(0.0);

    /// Physical noise with the standard Boltzmann constant.
    pub fn thermal(bandwidth: f64, noise_figure: f64, temperature: f64) -> Self {
        NoiseModel::Physical {
            bandwidth,
            noise_figure,
            boltzmann: BOLTZMANN,
            temperature,
        }
    }

    /// `β = B · (1/λ_u) · (F k T / b)`, or the override.
    pub fn beta(&self, lambda_u: f64, b: f64) -> f64 {
        match *self {
            NoiseModel::Physical {
                bandwidth,
                noise_figure,
                boltzmann,
                temperature,
            } => bandwidth / lambda_u * (noise_figure * boltzmann * temperature / b),
            NoiseModel::Beta(beta) => beta,
        }
    }
}

/// Every symbol of the single-tier system model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// BS density `λ_b`, points per unit area.
    pub lambda_b: f64,
    /// User density `λ_u`, points per unit area.
    pub lambda_u: f64,
    /// Pathloss exponent `α`.
    pub alpha: f64,
    /// Pathloss coefficient `b` in `g(r) = b·r^(-α)`.
    pub b: f64,
    /// Target SINR `γ`, linear.
    pub gamma: f64,
    pub noise: NoiseModel,
}

impl NetworkParams {
    /// Parameters with the normalized pathloss coefficient `b = 1`.
    pub fn new(lambda_b: f64, lambda_u: f64, alpha: f64, gamma: f64, noise: NoiseModel) -> Self {
        NetworkParams {
            lambda_b,
            lambda_u,
            alpha,
            b: 1.0,
            gamma,
            noise,
        }
    }

    pub fn with_pathloss_coefficient(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_lambda_b(mut self, lambda_b: f64) -> Self {
        self.lambda_b = lambda_b;
        self
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn beta(&self) -> f64 {
        self.noise.beta(self.lambda_u, self.b)
    }

    /// `σ² = β·λ_b`.
    pub fn sigma_sq(&self) -> f64 {
        self.beta() * self.lambda_b
    }

    /// Users per BS, `η = λ_u/λ_b`; also the popularity steepness.
    pub fn eta(&self) -> f64 {
        self.lambda_u / self.lambda_b
    }

    /// Pathloss `g(r) = b·r^(-α)`.
    pub fn pathloss(&self, r: f64) -> f64 {
        self.b * r.powf(-self.alpha)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn derive(&self) -> Result<DerivedConstants> {
        derive(self)
    }
}

/// A violated constraint on [`NetworkParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NonFinite(&'static str),
    LambdaBPositive,
    LambdaUPositive,
    UsersDenserThanBs,
    AlphaAboveTwo,
    AlphaInModeledRange,
    PathlossPositive,
    GammaAboveOne,
    BetaNonNegative,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite(name) => write!(f, "{name} is finite"),
            Violation::LambdaBPositive => f.write_str("lambda_b > 0"),
            Violation::LambdaUPositive => f.write_str("lambda_u > 0"),
            Violation::UsersDenserThanBs => f.write_str("lambda_u > lambda_b"),
            Violation::AlphaAboveTwo => f.write_str("alpha > 2"),
            Violation::AlphaInModeledRange => write!(f, "alpha <= {MAX_ALPHA}"),
            Violation::PathlossPositive => f.write_str("b > 0"),
            Violation::GammaAboveOne => f.write_str("gamma > 1"),
            Violation::BetaNonNegative => f.write_str("beta >= 0"),
        }
    }
}

/// Every violated invariant of a parameter set; empty iff all hold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, v: Violation) -> bool {
        self.violations.contains(&v)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        f.write_str("violated: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate(params: &NetworkParams) -> ValidationReport {
    let mut violations = Vec::new();
    let fields = [
        ("lambda_b", params.lambda_b),
        ("lambda_u", params.lambda_u),
        ("alpha", params.alpha),
        ("b", params.b),
        ("gamma", params.gamma),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            violations.push(Violation::NonFinite(name));
        }
    }
    if !(params.lambda_b > 0.0) {
        violations.push(Violation::LambdaBPositive);
    }
    if !(params.lambda_u > 0.0) {
        violations.push(Violation::LambdaUPositive);
    }
    if !(params.lambda_u > params.lambda_b) {
        violations.push(Violation::UsersDenserThanBs);
    }
    if !(params.alpha > 2.0) {
        violations.push(Violation::AlphaAboveTwo);
    }
    if params.alpha > MAX_ALPHA {
        violations.push(Violation::AlphaInModeledRange);
    }
    if !(params.b > 0.0) {
        violations.push(Violation::PathlossPositive);
    }
    if !(params.gamma > 1.0) {
        violations.push(Violation::GammaAboveOne);
    }
    let beta = params.beta();
    if beta.is_nan() || beta < 0.0 {
        violations.push(Violation::BetaNonNegative);
    } else if !beta.is_finite() {
        violations.push(Violation::NonFinite("beta"));
    }
    ValidationReport { violations }
}

/// Constants shared by the coverage, APC and EE expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `C(α) = (2π²/α)·csc(2π/α)`.
    pub c_alpha: f64,
    /// `A′ = β·Γ(1+α/2) / (b·C(α)^(α/2))`, the low-noise correction constant.
    pub a_prime: f64,
    /// `A = A′^(2/(α−2))`, the QoS density-bound constant.
    pub a: f64,
    pub beta: f64,
    pub sigma_sq: f64,
    /// `η = λ_u/λ_b`.
    pub eta: f64,
    /// Noise-free coverage probability.
    pub pcov_nn: f64,
}

/// `C(α) = (2π²/α)·csc(2π/α)`.
///
/// Finite and positive on `(2, MAX_ALPHA]`; the poles of `csc(2π/α)` sit at
/// `α = 2/n` and never reach that range.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::param("alpha", format!("{alpha} must exceed 2")));
    }
    if alpha > MAX_ALPHA {
        return Err(Error::ExponentOutOfRange {
            alpha,
            max: MAX_ALPHA,
        });
    }
    let angle = 2.0 * PI / alpha;
    Ok(2.0 * PI * PI / alpha / angle.sin())
}

/// `A′` for a given `α`, `β` and `b`.
pub fn a_prime(alpha: f64, beta: f64, b: f64) -> Result<f64> {
    let c = c_alpha(alpha)?;
    Ok(beta * gamma(1.0 + alpha / 2.0) / (b * c.powf(alpha / 2.0)))
}

/// `A = A′^(2/(α−2))`.
pub fn density_bound_constant(a_prime: f64, alpha: f64) -> f64 {
    a_prime.powf(2.0 / (alpha - 2.0))
}

/// Inverse of [`density_bound_constant`]: `A′ = A^((α−2)/2)`.
pub fn a_prime_from_bound(a: f64, alpha: f64) -> f64 {
    a.powf((alpha - 2.0) / 2.0)
}

pub fn derive(params: &NetworkParams) -> Result<DerivedConstants> {
    params.validate().into_result()?;
    let beta = params.beta();
    let c = c_alpha(params.alpha)?;
    let a_prime = a_prime(params.alpha, beta, params.b)?;
    Ok(DerivedConstants {
        c_alpha: c,
        a_prime,
        a: density_bound_constant(a_prime, params.alpha),
        beta,
        sigma_sq: beta * params.lambda_b,
        eta: params.eta(),
        pcov_nn: coverage::coverage_nn(params),
    })
}
