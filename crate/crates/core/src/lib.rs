//! Area power consumption (APC) and energy efficiency (EE) of cache-enabled
//! base stations deployed as a homogeneous Poisson point process.
//!
//! The crate is organised bottom-up:
//!
//! - [`network`]: system-model parameters and the constants derived from them.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration on finite and
//!   semi-infinite ranges.
//! - [`coverage`]: max-SINR coverage probability (exact, noise-free and
//!   low-noise forms) and the QoS-boundary BS density.
//! - [`cache`]: content popularity, hit/miss probabilities and per-BS power.
//! - [`metrics`]: APC and EE objectives with analytic derivatives.
//! - [`optim`]: closed-form and golden-section optimizers for those objectives.
//! - [`montecarlo`]: an independent PPP simulator used as an oracle.
//!
//! All quantities are linear scale; densities are per unit area.

pub mod cache;
pub mod coverage;
mod error;
pub mod metrics;
pub mod montecarlo;
pub mod network;
pub mod optim;
pub mod quadrature;

pub use cache::{CachePowerParams, PopularityModel};
pub use coverage::{CoverageQuery, LowNoiseCoverage};
pub use error::{Error, Result};
pub use metrics::{ApcQuery, CacheMode, DensityRule, EeQuery, NoiseCorrection};
pub use montecarlo::{NetworkRealization, SimConfig, SimEstimate};
pub use network::{DerivedConstants, NetworkParams, NoiseModel, ValidationReport, Violation};
pub use optim::{Method, OptimumReport, ScalarOptimum};
