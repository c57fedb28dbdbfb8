//! Experiment configuration.
//!
//! Grammar, one setting per line:
//!
//! ```text
//! # comment
//! key = value
//! f0 = 10, 100, 1000
//! ```
//!
//! Lines of the form `# config: key = value` are settings too, so the
//! metadata block at the top of any output file is itself a valid config.
//! When a file contains such lines, everything else in it is ignored.

use std::fmt;
use std::str::FromStr;

use greencache::{CachePowerParams, NetworkParams, NoiseCorrection, NoiseModel};

use crate::error::ConfigError;

/// Prefix marking settings echoed into output files.
pub const ECHO_PREFIX: &str = "# config:";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    ApcSweep,
    EeSweep,
    Optimize,
    McValidate,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::ApcSweep => "apc_sweep",
            Kind::EeSweep => "ee_sweep",
            Kind::Optimize => "optimize",
            Kind::McValidate => "mc_validate",
        }
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "apc_sweep" | "apc-sweep" => Ok(Kind::ApcSweep),
            "ee_sweep" | "ee-sweep" => Ok(Kind::EeSweep),
            "optimize" => Ok(Kind::Optimize),
            "mc_validate" | "mc-validate" => Ok(Kind::McValidate),
            _ => Err(format!("unknown experiment kind `{s}`")),
        }
    }
}

/// Choice of the correction coefficient `c` in the EE expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `c = 1`.
    Paper,
    /// `c = A′·λ_b^(1−α/2)`.
    Derived,
    /// `c = A·λ_b^(1−α/2)`.
    Literal,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Paper => "paper",
            Convention::Derived => "derived",
            Convention::Literal => "literal",
        }
    }

    pub fn correction(&self) -> NoiseCorrection {
        match self {
            Convention::Paper => NoiseCorrection::Unit,
            Convention::Derived => NoiseCorrection::LowNoise,
            Convention::Literal => NoiseCorrection::DensityBound,
        }
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Convention::Paper),
            "derived" => Ok(Convention::Derived),
            "literal" => Ok(Convention::Literal),
            _ => Err(format!("unknown convention `{s}` (expected paper, derived or literal)")),
        }
    }
}

/// Receiver noise: a normalized `β`, or the physical `B`, `F`, `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    Beta(f64),
    Thermal {
        bandwidth: f64,
        noise_figure: f64,
        temperature: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub lambda_b: f64,
    pub lambda_u: f64,
    pub alpha: f64,
    /// Extra pathloss exponents to sweep; empty means `alpha` only.
    pub alphas: Vec<f64>,
    pub b: f64,
    pub gamma: f64,
    pub noise: NoiseSpec,
    /// Explicit QoS density constant `A`; derived from the network if unset.
    pub bound_constant: Option<f64>,
    /// Explicit noise-free coverage for the EE numerator.
    pub coverage_nn: Option<f64>,
    pub p_s: f64,
    pub p_d: f64,
    pub f0: Vec<f64>,
    pub p_start: f64,
    pub p_stop: f64,
    pub p_step: f64,
    /// Operating point for Monte Carlo validation.
    pub transmit_power: f64,
    pub convention: Convention,
    pub seed: u64,
    pub trials: u64,
    pub requests: u64,
    pub window_radius: Option<f64>,
    /// Added to `γ` in the simulation only; nonzero values must fail validation.
    pub mc_gamma_perturbation: f64,
}

/// Every key, in echo order.
pub const KEYS: &[&str] = &[
    "kind",
    "lambda_b",
    "lambda_u",
    "alpha",
    "alphas",
    "b",
    "gamma",
    "beta",
    "bandwidth",
    "noise_figure",
    "temperature",
    "bound_constant",
    "coverage_nn",
    "p_s",
    "p_d",
    "f0",
    "p_start",
    "p_stop",
    "p_step",
    "transmit_power",
    "convention",
    "seed",
    "trials",
    "requests",
    "window_radius",
    "mc_gamma_perturbation",
];

pub const PRESETS: &[&str] = &["fig2", "fig3", "fig4", "optimize", "mc"];

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: Kind::ApcSweep,
            lambda_b: 0.5,
            lambda_u: 0.6,
            alpha: 4.75,
            alphas: Vec::new(),
            b: 1.0,
            gamma: 2.0,
            noise: NoiseSpec::Beta(1.0),
            bound_constant: None,
            coverage_nn: None,
            p_s: 25.0,
            p_d: 10.0,
            f0: vec![10.0, 100.0, 1000.0],
            p_start: 0.5,
            p_stop: 99.0,
            p_step: 0.5,
            transmit_power: 50.0,
            convention: Convention::Paper,
            seed: 1,
            trials: 200_000,
            requests: 1_000_000,
            window_radius: None,
            mc_gamma_perturbation: 0.0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: format!("expected a {}", std::any::type_name::<T>()),
    })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse_optional(key: &str, value: &str) -> Result<Option<f64>, ConfigError> {
    match value {
        "auto" | "derived" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn optional(v: Option<f64>, absent: &str) -> String {
    v.map_or_else(|| absent.to_string(), |v| v.to_string())
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let base = ExperimentConfig::default();
        Ok(match name {
            "fig2" => base,
            "fig3" => ExperimentConfig {
                alphas: vec![4.0, 5.0, 6.0],
                bound_constant: Some(2.0),
                lambda_u: 5.0,
                f0: vec![10.0],
                ..base
            },
            "fig4" => ExperimentConfig {
                kind: Kind::EeSweep,
                coverage_nn: Some(1.0),
                p_start: 2.0,
                p_stop: 60.0,
                p_step: 0.25,
                ..base
            },
            "optimize" => ExperimentConfig {
                kind: Kind::Optimize,
                alphas: vec![4.0, 4.75, 5.0],
                coverage_nn: Some(1.0),
                ..base
            },
            "mc" => ExperimentConfig {
                kind: Kind::McValidate,
                lambda_b: 1.0,
                lambda_u: 1.2,
                alpha: 4.0,
                f0: vec![10.0],
                ..base
            },
            other => return Err(ConfigError::UnknownPreset(other.to_string())),
        })
    }

    /// Default preset for an experiment kind.
    pub fn for_kind(kind: Kind) -> Self {
        let name = match kind {
            Kind::ApcSweep => "fig2",
            Kind::EeSweep => "fig4",
            Kind::Optimize => "optimize",
            Kind::McValidate => "mc",
        };
        ExperimentConfig::preset(name).expect("built-in preset")
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "kind" => {
                self.kind = value.parse().map_err(|reason| ConfigError::BadValue {
                    key: key.to_string(),
                    value: value.to_string(),
                    reason,
                })?
            }
            "lambda_b" => self.lambda_b = parse(key, value)?,
            "lambda_u" => self.lambda_u = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "alphas" => self.alphas = parse_list(key, value)?,
            "b" => self.b = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "beta" => match value {
                "thermal" => self.set_thermal(|_| {}),
                v => self.noise = NoiseSpec::Beta(parse(key, v)?),
            },
            "bandwidth" => {
                let v = parse(key, value)?;
                self.set_thermal(|t| t.0 = v)
            }
            "noise_figure" => {
                let v = parse(key, value)?;
                self.set_thermal(|t| t.1 = v)
            }
            "temperature" => {
                let v = parse(key, value)?;
                self.set_thermal(|t| t.2 = v)
            }
            "bound_constant" => self.bound_constant = parse_optional(key, value)?,
            "coverage_nn" => self.coverage_nn = parse_optional(key, value)?,
            "p_s" => self.p_s = parse(key, value)?,
            "p_d" => self.p_d = parse(key, value)?,
            "f0" => self.f0 = parse_list(key, value)?,
            "p_start" => self.p_start = parse(key, value)?,
            "p_stop" => self.p_stop = parse(key, value)?,
            "p_step" => self.p_step = parse(key, value)?,
            "transmit_power" => self.transmit_power = parse(key, value)?,
            "convention" => {
                self.convention = value.parse().map_err(|reason| ConfigError::BadValue {
                    key: key.to_string(),
                    value: value.to_string(),
                    reason,
                })?
            }
            "seed" => self.seed = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "requests" => self.requests = parse(key, value)?,
            "window_radius" => self.window_radius = parse_optional(key, value)?,
            "mc_gamma_perturbation" => self.mc_gamma_perturbation = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    fn set_thermal(&mut self, update: impl FnOnce(&mut (f64, f64, f64))) {
        // Defaults: 10 MHz, noise figure 10 (linear), 290 K.
        let mut t = match self.noise {
            NoiseSpec::Thermal {
                bandwidth,
                noise_figure,
                temperature,
            } => (bandwidth, noise_figure, temperature),
            NoiseSpec::Beta(_) => (1e7, 10.0, 290.0),
        };
        update(&mut t);
        self.noise = NoiseSpec::Thermal {
            bandwidth: t.0,
            noise_figure: t.1,
            temperature: t.2,
        };
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax {
                line: 0,
                text: assignment.to_string(),
            })?;
        self.set(key.trim(), value)
    }

    /// Applies every setting in a config file's text.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let echoed = text.lines().any(|l| l.starts_with(ECHO_PREFIX));
        for (i, raw) in text.lines().enumerate() {
            let line = if echoed {
                match raw.strip_prefix(ECHO_PREFIX) {
                    Some(rest) => rest.trim(),
                    None => continue,
                }
            } else {
                raw.trim()
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_text(base: ExperimentConfig, text: &str) -> Result<Self, ConfigError> {
        let mut cfg = base;
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// `(key, value)` for every setting, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let (beta, bandwidth, noise_figure, temperature) = match self.noise {
            NoiseSpec::Beta(b) => (b.to_string(), "-".into(), "-".into(), "-".into()),
            NoiseSpec::Thermal {
                bandwidth,
                noise_figure,
                temperature,
            } => (
                "thermal".to_string(),
                bandwidth.to_string(),
                noise_figure.to_string(),
                temperature.to_string(),
            ),
        };
        let mut out = vec![
            ("kind", self.kind.as_str().to_string()),
            ("lambda_b", self.lambda_b.to_string()),
            ("lambda_u", self.lambda_u.to_string()),
            ("alpha", self.alpha.to_string()),
            ("alphas", list(&self.alphas)),
            ("b", self.b.to_string()),
            ("gamma", self.gamma.to_string()),
            ("beta", beta),
            ("bandwidth", bandwidth),
            ("noise_figure", noise_figure),
            ("temperature", temperature),
            ("bound_constant", optional(self.bound_constant, "derived")),
            ("coverage_nn", optional(self.coverage_nn, "derived")),
            ("p_s", self.p_s.to_string()),
            ("p_d", self.p_d.to_string()),
            ("f0", list(&self.f0)),
            ("p_start", self.p_start.to_string()),
            ("p_stop", self.p_stop.to_string()),
            ("p_step", self.p_step.to_string()),
            ("transmit_power", self.transmit_power.to_string()),
            ("convention", self.convention.as_str().to_string()),
            ("seed", self.seed.to_string()),
            ("trials", self.trials.to_string()),
            ("requests", self.requests.to_string()),
            ("window_radius", optional(self.window_radius, "auto")),
            ("mc_gamma_perturbation", self.mc_gamma_perturbation.to_string()),
        ];
        // Physical noise keys are only echoed when they are in force.
        if matches!(self.noise, NoiseSpec::Beta(_)) {
            out.retain(|(k, _)| !matches!(*k, "bandwidth" | "noise_figure" | "temperature"));
        }
        out
    }

    /// The metadata block: one `# config: key = value` line per setting.
    pub fn echo(&self) -> Vec<String> {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{ECHO_PREFIX} {k} = {v}"))
            .collect()
    }

    pub fn noise_model(&self) -> NoiseModel {
        match self.noise {
            NoiseSpec::Beta(b) => NoiseModel::Beta(b),
            NoiseSpec::Thermal {
                bandwidth,
                noise_figure,
                temperature,
            } => NoiseModel::thermal(bandwidth, noise_figure, temperature),
        }
    }

    pub fn network(&self) -> NetworkParams {
        self.network_at(self.alpha)
    }

    pub fn network_at(&self, alpha: f64) -> NetworkParams {
        NetworkParams::new(self.lambda_b, self.lambda_u, alpha, self.gamma, self.noise_model())
            .with_pathloss_coefficient(self.b)
    }

    /// Pathloss exponents to evaluate.
    pub fn alpha_values(&self) -> Vec<f64> {
        if self.alphas.is_empty() {
            vec![self.alpha]
        } else {
            self.alphas.clone()
        }
    }

    /// Power components at transmit power `p` for catalog `f0`.
    pub fn power(&self, p: f64, f0: f64) -> Result<CachePowerParams, ConfigError> {
        CachePowerParams::from_aggregates(p, self.p_s, self.p_d, f0).map_err(ConfigError::Model)
    }

    /// Transmit-power grid `p_start + i·p_step` for
    /// `i = 0..=floor((p_stop − p_start)/p_step)`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.p_stop - self.p_start) / self.p_step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.p_start + i as f64 * self.p_step).collect()
    }

    /// Checks everything that can be checked without running the model.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: self
                .entries()
                .into_iter()
                .find(|(k, _)| *k == key)
                .map_or_else(String::new, |(_, v)| v),
            reason: reason.to_string(),
        };
        if matches!(self.kind, Kind::ApcSweep | Kind::EeSweep) {
            if !(self.p_step > 0.0) || !self.p_step.is_finite() {
                return Err(bad("p_step", "step must be positive"));
            }
            if !(self.p_start > 0.0) || !(self.p_stop >= self.p_start) || !self.p_stop.is_finite() {
                return Err(bad("p_stop", "sweep range must be positive with p_stop >= p_start"));
            }
        }
        if self.f0.is_empty() {
            return Err(bad("f0", "at least one catalog size is required"));
        }
        if self.trials == 0 {
            return Err(bad("trials", "at least one trial is required"));
        }
        if self.requests == 0 {
            return Err(bad("requests", "at least one request is required"));
        }
        if let Some(r) = self.window_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(bad("window_radius", "radius must be positive"));
            }
        }
        for alpha in self.alpha_values() {
            let report = self.network_at(alpha).validate();
            if !report.is_valid() {
                return Err(ConfigError::Model(greencache::Error::InvalidNetwork(report)));
            }
        }
        for &f0 in &self.f0 {
            self.power(self.p_start.max(0.0), f0)?;
        }
        Ok(())
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
