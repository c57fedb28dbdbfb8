//! Monte Carlo simulation of the typical user in a PPP network.
//!
//! BSs are dropped in a disc of radius `R` around the origin; each trial
//! draws a Poisson count, uniform positions and unit-mean exponential
//! fading. Every trial owns a ChaCha stream selected by `(seed, trial)`, and
//! all reductions are integer counts, so estimates do not depend on the
//! number of worker threads (set `RAYON_NUM_THREADS` to cap it).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::cache::{self, CachePowerParams, PopularityModel};
use crate::error::{Error, Result};
use crate::network::NetworkParams;

/// Default ratio of expected out-of-window to in-window interference.
pub const DEFAULT_TRUNCATION_GUARD: f64 = 1e-3;

/// Requests simulated per parallel work item in the cache estimators.
const REQUEST_CHUNK: u64 = 1 << 16;

// Keys separating the random streams of independent estimators.
const NETWORK_DOMAIN: u64 = 0x6e65_7477_6f72_6b00;
const REQUEST_DOMAIN: u64 = 0x7265_7175_6573_7400;
const BEARING_DOMAIN: u64 = 0x6265_6172_696e_6700;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub network: NetworkParams,
    /// Power components; `power.transmit` is the simulated transmit power.
    pub power: CachePowerParams,
    pub window_radius: f64,
    pub trials: u64,
    pub seed: u64,
    /// Bound on expected out-of-window over in-window interference used to
    /// pick the default radius.
    pub truncation_guard: f64,
}

impl SimConfig {
    /// Config with the default window radius for the given guard.
    pub fn new(network: NetworkParams, power: CachePowerParams, trials: u64, seed: u64) -> Result<Self> {
        network.validate().into_result()?;
        if trials == 0 {
            return Err(Error::param("trials", "at least one trial is required"));
        }
        Ok(SimConfig {
            network,
            power,
            window_radius: default_window_radius(&network, DEFAULT_TRUNCATION_GUARD),
            trials,
            seed,
            truncation_guard: DEFAULT_TRUNCATION_GUARD,
        })
    }

    pub fn with_window_radius(mut self, radius: f64) -> Self {
        self.window_radius = radius;
        self
    }

    pub fn with_truncation_guard(mut self, guard: f64) -> Self {
        self.truncation_guard = guard;
        self.window_radius = default_window_radius(&self.network, guard);
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Expected number of BSs in the window, `λ_b π R²`.
    pub fn mean_bs_count(&self) -> f64 {
        self.network.lambda_b * PI * self.window_radius * self.window_radius
    }
}

/// `max(10/√λ_b, r₀·((1+g)/g)^(1/(α−2)))` with `r₀ = 1/√λ_b`.
///
/// The second term is where the expected interference from beyond `R`
/// falls to a fraction `g` of that from the annulus `[r₀, R]`.
pub fn default_window_radius(network: &NetworkParams, guard: f64) -> f64 {
    let r0 = 1.0 / network.lambda_b.sqrt();
    let tail = r0 * ((1.0 + guard) / guard).powf(1.0 / (network.alpha - 2.0));
    (10.0 * r0).max(tail)
}

/// One snapshot of BS positions and fading, seen from a user at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub positions: Vec<[f64; 2]>,
    /// Power fading gains `h_i`, exponential with mean 1.
    pub fading: Vec<f64>,
}

impl NetworkRealization {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain);
    rng.set_stream(index);
    rng
}

/// Draws the BSs of trial `trial` and hands each `(r², h)` to `visit`.
///
/// Bearings do not affect the SINR seen at the origin, so they come from a
/// separate stream that only [`sample_realization`] reads.
fn draw_bs(cfg: &SimConfig, radius: f64, trial: u64, mut visit: impl FnMut(f64, f64)) {
    let mut rng = stream(cfg.seed, NETWORK_DOMAIN, trial);
    let r_sq = radius * radius;
    let mean = cfg.network.lambda_b * PI * r_sq;
    let count = Poisson::new(mean).expect("positive finite mean").sample(&mut rng) as u64;
    for _ in 0..count {
        let d2 = r_sq * rng.random::<f64>();
        let h: f64 = Exp1.sample(&mut rng);
        visit(d2, h);
    }
}

pub fn sample_realization(cfg: &SimConfig, trial: u64) -> NetworkRealization {
    let mut bearings = stream(cfg.seed, BEARING_DOMAIN, trial);
    let mut real = NetworkRealization {
        positions: Vec::new(),
        fading: Vec::new(),
    };
    draw_bs(cfg, cfg.window_radius, trial, |d2, h| {
        let r = d2.sqrt();
        let theta = 2.0 * PI * bearings.random::<f64>();
        real.positions.push([r * theta.cos(), r * theta.sin()]);
        real.fading.push(h);
    });
    real
}

/// Running strongest received power and the interference from the rest,
/// both without the common `P·b` factor.
#[derive(Debug, Clone, Copy, Default)]
struct Strongest {
    best: f64,
    rest: f64,
    count: u64,
}

impl Strongest {
    fn push(&mut self, received: f64) {
        if self.count == 0 || received > self.best {
            if self.count > 0 {
                self.rest += self.best;
            }
            self.best = received;
        } else {
            self.rest += received;
        }
        self.count += 1;
    }

    fn sinr(&self, network: &NetworkParams, transmit: f64) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::EmptyWindow);
        }
        let scale = transmit * network.b;
        Ok(scale * self.best / (network.sigma_sq() + scale * self.rest))
    }
}

/// `h·r^(−α)` from the squared distance.
fn received(network: &NetworkParams, d2: f64, h: f64) -> f64 {
    if network.alpha == 4.0 {
        h / (d2 * d2)
    } else {
        h * d2.powf(-0.5 * network.alpha)
    }
}

/// Largest SINR over all BSs of a realization.
pub fn max_sinr(real: &NetworkRealization, cfg: &SimConfig) -> Result<f64> {
    max_sinr_within(real, cfg, f64::INFINITY)
}

/// As [`max_sinr`], ignoring BSs farther than `radius` from the user.
pub fn max_sinr_within(real: &NetworkRealization, cfg: &SimConfig, radius: f64) -> Result<f64> {
    let mut s = Strongest::default();
    let r2 = radius * radius;
    for (&[x, y], &h) in real.positions.iter().zip(&real.fading) {
        let d2 = x * x + y * y;
        if d2 <= r2 {
            s.push(received(&cfg.network, d2, h));
        }
    }
    s.sinr(&cfg.network, cfg.power.transmit)
}

fn trial_sinr(cfg: &SimConfig, trial: u64) -> Result<f64> {
    let mut s = Strongest::default();
    draw_bs(cfg, cfg.window_radius, trial, |d2, h| {
        s.push(received(&cfg.network, d2, h))
    });
    s.sinr(&cfg.network, cfg.power.transmit)
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl SimEstimate {
    /// Binomial proportion `k/n` with `SE = √(p(1−p)/n)`.
    pub fn proportion(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        SimEstimate {
            estimate: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Whether `value` lies within `max(k·SE, floor)` of the estimate.
    pub fn agrees_with(&self, value: f64, k: f64, floor: f64) -> bool {
        (self.estimate - value).abs() <= (k * self.std_error).max(floor)
    }
}

/// Coverage estimate plus the number of trials with an empty window, which
/// count as not covered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub coverage: SimEstimate,
    pub empty_windows: u64,
}

/// Fraction of trials whose best SINR reaches `γ`.
pub fn estimate_coverage(cfg: &SimConfig) -> CoverageEstimate {
    let gamma = cfg.network.gamma;
    let (covered, empty) = (0..cfg.trials)
        .into_par_iter()
        .map(|t| match trial_sinr(cfg, t) {
            Ok(sinr) => ((sinr >= gamma) as u64, 0u64),
            Err(_) => (0, 1),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    CoverageEstimate {
        coverage: SimEstimate::proportion(covered, cfg.trials),
        empty_windows: empty,
    }
}

/// Coverage at radius `R` and `2R` on coupled realizations: the `R` result
/// keeps only the BSs of the `2R` draw that fall inside `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConvergence {
    pub inner: SimEstimate,
    pub outer: SimEstimate,
    /// `coverage(R) − coverage(2R)`.
    pub difference: f64,
}

pub fn window_convergence(cfg: &SimConfig) -> WindowConvergence {
    let gamma = cfg.network.gamma;
    let radius = cfg.window_radius;
    let (inner, outer) = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut near = Strongest::default();
            let mut all = Strongest::default();
            draw_bs(cfg, 2.0 * radius, t, |d2, h| {
                let p = received(&cfg.network, d2, h);
                all.push(p);
                if d2 <= radius * radius {
                    near.push(p);
                }
            });
            let hit = |s: &Strongest| {
                s.sinr(&cfg.network, cfg.power.transmit)
                    .map_or(0u64, |v| (v >= gamma) as u64)
            };
            (hit(&near), hit(&all))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let inner = SimEstimate::proportion(inner, cfg.trials);
    let outer = SimEstimate::proportion(outer, cfg.trials);
    WindowConvergence {
        inner,
        outer,
        difference: inner.estimate - outer.estimate,
    }
}

/// Number of requests (out of `requests`) whose content rank falls inside
/// the catalog.
fn count_hits(cfg: &SimConfig, requests: u64) -> Result<u64> {
    let model = PopularityModel::new(cfg.network.eta())?;
    let catalog = cfg.power.catalog;
    let chunks = requests.div_ceil(REQUEST_CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(cfg.seed, REQUEST_DOMAIN, c);
            let n = REQUEST_CHUNK.min(requests - c * REQUEST_CHUNK);
            (0..n)
                .filter(|_| cache::sample_content_rank(&model, &mut rng) < catalog)
                .count() as u64
        })
        .sum())
}

/// Empirical cache hit rate over `requests` sampled content ranks, with
/// popularity steepness `λ_u/λ_b`.
pub fn estimate_hit_rate(cfg: &SimConfig, requests: u64) -> Result<SimEstimate> {
    if requests == 0 {
        return Err(Error::param("requests", "at least one request is required"));
    }
    Ok(SimEstimate::proportion(count_hits(cfg, requests)?, requests))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApcEeEstimate {
    pub coverage: SimEstimate,
    pub hit_rate: SimEstimate,
    /// Mean per-BS total power.
    pub total_power: SimEstimate,
    pub apc: SimEstimate,
    pub ee: SimEstimate,
}

/// APC and EE from simulated hit/miss indicators and simulated coverage.
///
/// Each request costs `P + P_o + P_hd` on a hit and `P + P_o + P_bh` on a
/// miss. `APC = λ_b·mean(P_tot)`; `EE = λ_b ln(1+γ)·coverage/mean(P_tot)`
/// with its error propagated by the delta method.
pub fn estimate_apc_ee(cfg: &SimConfig, requests: u64) -> Result<ApcEeEstimate> {
    apc_ee_with_coverage(cfg, estimate_coverage(cfg).coverage, requests)
}

/// As [`estimate_apc_ee`], reusing a coverage estimate already computed for `cfg`.
pub fn apc_ee_with_coverage(cfg: &SimConfig, coverage: SimEstimate, requests: u64) -> Result<ApcEeEstimate> {
    let hit_rate = estimate_hit_rate(cfg, requests)?;
    let p = &cfg.power;
    let hits = (hit_rate.estimate * requests as f64).round();
    let misses = requests as f64 - hits;
    let base = p.transmit + p.operational;
    let mean_power = base + p.disk * hits / requests as f64 + p.backhaul * misses / requests as f64;
    let spread = p.backhaul - p.disk;
    let h = hit_rate.estimate;
    let power_se = spread.abs() * (h * (1.0 - h) / requests as f64).sqrt();
    let total_power = SimEstimate {
        estimate: mean_power,
        std_error: power_se,
        trials: requests,
    };

    let lambda_b = cfg.network.lambda_b;
    let apc = SimEstimate {
        estimate: lambda_b * mean_power,
        std_error: lambda_b * power_se,
        trials: requests,
    };
    let ase = lambda_b * cfg.network.gamma.ln_1p();
    let ee_value = ase * coverage.estimate / mean_power;
    let rel_cov = if coverage.estimate > 0.0 {
        coverage.std_error / coverage.estimate
    } else {
        0.0
    };
    let rel_pow = power_se / mean_power;
    let ee = SimEstimate {
        estimate: ee_value,
        std_error: if coverage.estimate > 0.0 {
            ee_value * (rel_cov * rel_cov + rel_pow * rel_pow).sqrt()
        } else {
            ase * coverage.std_error / mean_power
        },
        trials: cfg.trials,
    };
    Ok(ApcEeEstimate {
        coverage,
        hit_rate,
        total_power,
        apc,
        ee,
    })
}
