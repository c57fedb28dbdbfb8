//! Area power consumption and energy efficiency objectives.
//!
//! APC is `λ_b · P_tot`. Under [`DensityRule::QosBoundary`] the density is
//! tied to the transmit power through the QoS bound `λ_b = A·P^(−2/(α−2))`,
//! which also makes the popularity steepness `η = λ_u/λ_b` grow with `P`.
//!
//! EE is `λ_b log(1+γ) P_cov^NN (1 − c/P) / P_tot` at a fixed density, where
//! `c` is the low-noise correction coefficient (see [`NoiseCorrection`]).

use crate::cache::{self, CachePowerParams};
use crate::coverage;
use crate::error::{Error, Result};
use crate::network::NetworkParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CacheMode {
    Cached,
    Uncached,
}

impl CacheMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CacheMode::Cached => "cached",
            CacheMode::Uncached => "uncached",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityRule {
    /// `λ_b = A·P^(−2/(α−2))`, the minimal density meeting the QoS constraint.
    QosBoundary { bound_constant: f64 },
    /// `λ_b` as given in the network parameters.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApcQuery {
    pub power: CachePowerParams,
    pub network: NetworkParams,
    pub mode: CacheMode,
    pub density: DensityRule,
}

impl ApcQuery {
    /// QoS-boundary query with `A` derived from the network's noise and pathloss.
    pub fn qos_boundary(power: CachePowerParams, network: NetworkParams, mode: CacheMode) -> Result<Self> {
        let a = network.derive()?.a;
        Ok(ApcQuery {
            power,
            network,
            mode,
            density: DensityRule::QosBoundary { bound_constant: a },
        })
    }

    pub fn fixed(power: CachePowerParams, network: NetworkParams, mode: CacheMode) -> Result<Self> {
        network.validate().into_result()?;
        Ok(ApcQuery {
            power,
            network,
            mode,
            density: DensityRule::Fixed,
        })
    }

    /// Replaces the derived `A` with an explicit value (the figures quote `A = 2`).
    pub fn with_bound_constant(mut self, a: f64) -> Self {
        self.density = DensityRule::QosBoundary { bound_constant: a };
        self
    }

    pub fn with_mode(mut self, mode: CacheMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_catalog(mut self, catalog: f64) -> Result<Self> {
        self.power = self.power.with_catalog(catalog)?;
        Ok(self)
    }

    /// `ε = α − 4`.
    pub fn epsilon(&self) -> f64 {
        self.network.alpha - 4.0
    }

    /// BS density in force at transmit power `p`.
    pub fn density(&self, p: f64) -> f64 {
        match self.density {
            DensityRule::QosBoundary { bound_constant } => {
                coverage::density_at_bound(bound_constant, self.network.alpha, p)
            }
            DensityRule::Fixed => self.network.lambda_b,
        }
    }

    /// Popularity steepness `λ_u/λ_b` at transmit power `p`.
    pub fn eta(&self, p: f64) -> f64 {
        self.network.lambda_u / self.density(p)
    }
}

fn miss(q: &ApcQuery, mode: CacheMode, p: f64) -> f64 {
    match mode {
        CacheMode::Cached => cache::miss_probability(q.power.catalog, q.eta(p)),
        CacheMode::Uncached => 1.0,
    }
}

fn apc_with_mode(q: &ApcQuery, mode: CacheMode, p: f64) -> f64 {
    let power = q.power.with_transmit(p);
    let per_bs = match mode {
        CacheMode::Cached => cache::total_power_cached(&power, q.eta(p)),
        CacheMode::Uncached => cache::total_power_uncached(&power),
    };
    q.density(p) * per_bs
}

/// APC for the query's cache mode.
pub fn apc(q: &ApcQuery, p: f64) -> f64 {
    apc_with_mode(q, q.mode, p)
}

/// `λ_b(P) · (P + P_s + P_d f₀^(1−η(P)))`.
pub fn apc_cached(q: &ApcQuery, p: f64) -> f64 {
    apc_with_mode(q, CacheMode::Cached, p)
}

/// `λ_b(P) · (P + P_s + P_d)`.
pub fn apc_uncached(q: &ApcQuery, p: f64) -> f64 {
    apc_with_mode(q, CacheMode::Uncached, p)
}

/// Analytic `dAPC/dP` for the query's cache mode.
///
/// With `λ(P) = A P^(−e)`, `e = 2/(α−2)`: `λ′ = −eλ/P`, `η′ = eη/P` and the
/// miss probability `M = f₀^(1−η)` has `M′ = −ln f₀ · η′ · M`.
pub fn apc_derivative(q: &ApcQuery, p: f64) -> f64 {
    let lambda = q.density(p);
    let ps = q.power.static_power();
    let pd = q.power.backhaul_premium();
    let m = miss(q, q.mode, p);
    let per_bs = p + ps + pd * m;
    let (dlambda, dm) = match q.density {
        DensityRule::QosBoundary { .. } => {
            let e = 2.0 / (q.network.alpha - 2.0);
            let dm = match q.mode {
                CacheMode::Cached => -q.power.catalog.ln() * (e * q.eta(p) / p) * m,
                CacheMode::Uncached => 0.0,
            };
            (-e * lambda / p, dm)
        }
        DensityRule::Fixed => (0.0, 0.0),
    };
    dlambda * per_bs + lambda * (1.0 + pd * dm)
}

/// How the low-noise correction coefficient `c` in `(1 − c/P)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseCorrection {
    /// `c = 1`: the convention under which the printed EE maximizers hold.
    Unit,
    /// `c = A′·λ_b^(1−α/2)`, consistent with the low-noise coverage form.
    LowNoise,
    /// `c = A·λ_b^(1−α/2)`, the coefficient as printed in the EE expressions.
    DensityBound,
    Explicit(f64),
}

impl NoiseCorrection {
    pub fn coefficient(&self, network: &NetworkParams) -> Result<f64> {
        let decay = network.lambda_b.powf(1.0 - network.alpha / 2.0);
        Ok(match *self {
            NoiseCorrection::Unit => 1.0,
            NoiseCorrection::LowNoise => network.derive()?.a_prime * decay,
            NoiseCorrection::DensityBound => network.derive()?.a * decay,
            NoiseCorrection::Explicit(c) => c,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseCorrection::Unit => "paper",
            NoiseCorrection::LowNoise => "derived",
            NoiseCorrection::DensityBound => "literal",
            NoiseCorrection::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeQuery {
    pub power: CachePowerParams,
    pub network: NetworkParams,
    pub correction: NoiseCorrection,
    /// Noise-free coverage used in the ASE numerator.
    pub coverage_nn: f64,
    coefficient: f64,
}

impl EeQuery {
    pub fn new(power: CachePowerParams, network: NetworkParams, correction: NoiseCorrection) -> Result<Self> {
        network.validate().into_result()?;
        let coefficient = correction.coefficient(&network)?;
        if !(coefficient >= 0.0) || !coefficient.is_finite() {
            return Err(Error::param(
                "correction",
                format!("coefficient {coefficient} must be finite and non-negative"),
            ));
        }
        Ok(EeQuery {
            power,
            network,
            correction,
            coverage_nn: coverage::coverage_nn(&network),
            coefficient,
        })
    }

    /// Overrides `P_cov^NN` (the EE figure fixes it to 1).
    pub fn with_coverage_nn(mut self, pcov_nn: f64) -> Self {
        self.coverage_nn = pcov_nn;
        self
    }

    pub fn with_catalog(mut self, catalog: f64) -> Result<Self> {
        self.power = self.power.with_catalog(catalog)?;
        Ok(self)
    }

    /// The correction coefficient `c`.
    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// `λ_b log(1+γ) P_cov^NN`, in nats.
    pub fn ase_scale(&self) -> f64 {
        self.network.lambda_b * self.network.gamma.ln_1p() * self.coverage_nn
    }

    /// Non-transmit part of the per-BS power: `P_s + P_d·f₀^(1−η)` or `P_s + P_d`.
    pub fn fixed_power(&self, mode: CacheMode) -> f64 {
        let miss = match mode {
            CacheMode::Cached => cache::miss_probability(self.power.catalog, self.network.eta()),
            CacheMode::Uncached => 1.0,
        };
        self.power.static_power() + self.power.backhaul_premium() * miss
    }
}

pub fn ee(q: &EeQuery, mode: CacheMode, p: f64) -> f64 {
    q.ase_scale() * (1.0 - q.coefficient / p) / (p + q.fixed_power(mode))
}

pub fn ee_cached(q: &EeQuery, p: f64) -> f64 {
    ee(q, CacheMode::Cached, p)
}

pub fn ee_uncached(q: &EeQuery, p: f64) -> f64 {
    ee(q, CacheMode::Uncached, p)
}

/// `dE/dP = k (−P² + 2cP + cK) / (P² (P+K)²)` with `k` the ASE scale.
pub fn ee_derivative(q: &EeQuery, mode: CacheMode, p: f64) -> f64 {
    let c = q.coefficient;
    let k = q.fixed_power(mode);
    q.ase_scale() * (-p * p + 2.0 * c * p + c * k) / (p * p * (p + k) * (p + k))
}

/// Converts an EE value in nats to bits.
pub fn nats_to_bits(v: f64) -> f64 {
    v / std::f64::consts::LN_2
}
