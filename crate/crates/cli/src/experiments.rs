//! Experiment runners behind the CLI subcommands.

use greencache::cache;
use greencache::coverage::{coverage_exact, coverage_nn, CoverageQuery};
use greencache::metrics::{self, ApcQuery, CacheMode, EeQuery, NoiseCorrection};
use greencache::montecarlo::{self, SimConfig};
use greencache::optim::{self, OptimumReport};
use greencache::{Error, NoiseModel, SimEstimate};

use crate::config::{ExperimentConfig, Kind};
use crate::error::ConfigError;
use crate::sweep::SweepResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

/// Rendered output plus whether every check in it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

/// Runs the experiment named by `cfg.kind`. Sweeps are always CSV; reports
/// default to one `key=value` line per result.
pub fn run(cfg: &ExperimentConfig, format: Option<Format>) -> Result<Output, ConfigError> {
    cfg.validate()?;
    let report_format = format.unwrap_or(Format::Text);
    Ok(match cfg.kind {
        Kind::ApcSweep => Output {
            text: run_apc_sweep(cfg)?.to_csv(),
            passed: true,
        },
        Kind::EeSweep => Output {
            text: run_ee_sweep(cfg)?.to_csv(),
            passed: true,
        },
        Kind::Optimize => {
            let rows = run_optimize(cfg)?;
            Output {
                text: render(cfg, &rows, report_format),
                passed: rows.iter().all(|r| r.status != "failed"),
            }
        }
        Kind::McValidate => {
            let report = run_mc_validate(cfg)?;
            let mut records: Vec<Record> = report.rows.iter().map(ValidationRow::record).collect();
            records.push(Record::new().with("quantity", "overall").with("status", pass_str(report.passed)));
            Output {
                text: render_records(cfg, &records, report_format),
                passed: report.passed,
            }
        }
    })
}

fn metadata(cfg: &ExperimentConfig, derived: Vec<String>) -> Vec<String> {
    let mut out = vec![
        format!("# greencache {}", env!("CARGO_PKG_VERSION")),
        format!("# experiment: {}", cfg.kind.as_str()),
    ];
    out.extend(derived.into_iter().map(|d| format!("# derived: {d}")));
    out.extend(cfg.echo());
    out
}

/// Column suffix distinguishing pathloss exponents when several are swept.
fn alpha_suffix(cfg: &ExperimentConfig, alpha: f64) -> String {
    if cfg.alpha_values().len() > 1 {
        format!("_alpha_{alpha}")
    } else {
        String::new()
    }
}

pub fn apc_query(cfg: &ExperimentConfig, alpha: f64, f0: f64, mode: CacheMode) -> Result<ApcQuery, ConfigError> {
    let q = ApcQuery::qos_boundary(cfg.power(1.0, f0)?, cfg.network_at(alpha), mode)?;
    Ok(match cfg.bound_constant {
        Some(a) => q.with_bound_constant(a),
        None => q,
    })
}

pub fn ee_query(cfg: &ExperimentConfig, alpha: f64, f0: f64) -> Result<EeQuery, ConfigError> {
    let q = EeQuery::new(cfg.power(1.0, f0)?, cfg.network_at(alpha), cfg.convention.correction())?;
    Ok(match cfg.coverage_nn {
        Some(p) => q.with_coverage_nn(p),
        None => q,
    })
}

fn bound_constant(q: &ApcQuery) -> f64 {
    match q.density {
        metrics::DensityRule::QosBoundary { bound_constant } => bound_constant,
        metrics::DensityRule::Fixed => f64::NAN,
    }
}

/// APC under the QoS-boundary density over the transmit-power grid.
///
/// Columns: `P`, `apc_cached_f0_<f0>` per catalog size, `apc_uncached`
/// (each suffixed `_alpha_<α>` when several exponents are swept) and
/// `eta_le_one`, set to 1 on rows where some cached column has `η ≤ 1` and
/// the popularity law no longer applies.
pub fn run_apc_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, ConfigError> {
    let mut columns = vec!["P".to_string()];
    let mut queries = Vec::new();
    let mut derived = Vec::new();
    for alpha in cfg.alpha_values() {
        let suffix = alpha_suffix(cfg, alpha);
        for &f0 in &cfg.f0 {
            columns.push(format!("apc_cached_f0_{f0}{suffix}"));
            queries.push(apc_query(cfg, alpha, f0, CacheMode::Cached)?);
        }
        columns.push(format!("apc_uncached{suffix}"));
        let uncached = apc_query(cfg, alpha, cfg.f0[0], CacheMode::Uncached)?;
        derived.push(format!("alpha = {alpha}, A = {}", bound_constant(&uncached)));
        queries.push(uncached);
    }
    columns.push("eta_le_one".to_string());

    let mut result = SweepResult::new(metadata(cfg, derived), columns);
    for p in cfg.grid() {
        let mut row = vec![p];
        let mut flag = false;
        for q in &queries {
            row.push(metrics::apc(q, p));
            flag |= q.mode == CacheMode::Cached && !(q.eta(p) > 1.0);
        }
        row.push(flag as u8 as f64);
        result.push(row);
    }
    Ok(result)
}

/// EE at the configured density over the transmit-power grid.
///
/// Columns: `P`, `ee_cached_f0_<f0>`, `ee_uncached` and `p_le_c`, set to 1
/// on rows with `P ≤ c` where the low-noise correction breaks down.
pub fn run_ee_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, ConfigError> {
    let mut columns = vec!["P".to_string()];
    let mut queries = Vec::new();
    let mut derived = Vec::new();
    let mut max_c: f64 = 0.0;
    for alpha in cfg.alpha_values() {
        let suffix = alpha_suffix(cfg, alpha);
        for &f0 in &cfg.f0 {
            columns.push(format!("ee_cached_f0_{f0}{suffix}"));
            queries.push((ee_query(cfg, alpha, f0)?, CacheMode::Cached));
        }
        columns.push(format!("ee_uncached{suffix}"));
        let q = ee_query(cfg, alpha, cfg.f0[0])?;
        derived.push(format!(
            "alpha = {alpha}, c = {}, coverage_nn = {}",
            q.coefficient(),
            q.coverage_nn
        ));
        max_c = max_c.max(q.coefficient());
        queries.push((q, CacheMode::Uncached));
    }
    columns.push("p_le_c".to_string());

    let mut result = SweepResult::new(metadata(cfg, derived), columns);
    for p in cfg.grid() {
        let mut row = vec![p];
        row.extend(queries.iter().map(|(q, mode)| metrics::ee(q, *mode, p)));
        row.push((p <= max_c) as u8 as f64);
        result.push(row);
    }
    Ok(result)
}

/// Ordered `key=value` fields of one report line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(&'static str, String)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, key: &'static str, value: impl ToString) -> Self {
        self.0.push((key, value.to_string()));
        self
    }

    fn with_opt(self, key: &'static str, value: Option<f64>) -> Self {
        self.with(key, value.map_or_else(|| "-".to_string(), |v| v.to_string()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_line(&self) -> String {
        self.0
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// One optimizer outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeRow {
    pub objective: String,
    pub alpha: f64,
    pub f0: Option<f64>,
    /// `ok`, `no_minimum` or `failed`.
    pub status: &'static str,
    pub report: Option<OptimumReport>,
    pub detail: Option<String>,
}

impl OptimizeRow {
    pub fn record(&self) -> Record {
        let r = Record::new()
            .with("objective", &self.objective)
            .with("alpha", self.alpha)
            .with_opt("f0", self.f0)
            .with("status", self.status);
        let Some(rep) = &self.report else {
            let detail = self.detail.as_deref().unwrap_or("-").replace('"', "'");
            return r.with("detail", format!("\"{detail}\""));
        };
        r.with("method", rep.method)
            .with("argument", rep.argument)
            .with("value", rep.value)
            .with("numeric", rep.numeric.argument)
            .with("numeric_value", rep.numeric.value)
            .with_opt("closed_form", rep.closed_form)
            .with_opt("agreement", rep.agreement())
            .with_opt("paper_closed_form", rep.paper_closed_form)
            .with_opt("lower_bound", rep.lower_bound)
            .with(
                "exceeds_bound",
                rep.exceeds_bound().map_or("-".to_string(), |b| b.to_string()),
            )
            .with_opt("correction", rep.correction)
            .with("evaluations", rep.numeric.evaluations)
    }
}

fn optimize_row(objective: String, alpha: f64, f0: Option<f64>, result: greencache::Result<OptimumReport>) -> OptimizeRow {
    let (status, report, detail) = match result {
        Ok(rep) => ("ok", Some(rep), None),
        Err(e @ Error::NoMinimum { .. }) => ("no_minimum", None, Some(e.to_string())),
        Err(e) => ("failed", None, Some(e.to_string())),
    };
    OptimizeRow {
        objective,
        alpha,
        f0,
        status,
        report,
        detail,
    }
}

/// APC minimizers (QoS-boundary density) and EE maximizers (fixed density)
/// for every configured exponent and catalog size.
pub fn run_optimize(cfg: &ExperimentConfig) -> Result<Vec<OptimizeRow>, ConfigError> {
    let mut rows = Vec::new();
    for alpha in cfg.alpha_values() {
        let q = apc_query(cfg, alpha, cfg.f0[0], CacheMode::Uncached)?;
        rows.push(optimize_row("apc_uncached".into(), alpha, None, optim::minimize_apc(&q)));
        for &f0 in &cfg.f0 {
            let q = apc_query(cfg, alpha, f0, CacheMode::Cached)?;
            rows.push(optimize_row("apc_cached".into(), alpha, Some(f0), optim::minimize_apc(&q)));
        }
        let q = ee_query(cfg, alpha, cfg.f0[0])?;
        rows.push(optimize_row(
            "ee_uncached".into(),
            alpha,
            None,
            optim::maximize_ee(&q, CacheMode::Uncached),
        ));
        for &f0 in &cfg.f0 {
            let q = ee_query(cfg, alpha, f0)?;
            rows.push(optimize_row(
                "ee_cached".into(),
                alpha,
                Some(f0),
                optim::maximize_ee(&q, CacheMode::Cached),
            ));
        }
    }
    Ok(rows)
}

fn render(cfg: &ExperimentConfig, rows: &[OptimizeRow], format: Format) -> String {
    let records: Vec<Record> = rows.iter().map(OptimizeRow::record).collect();
    render_records(cfg, &records, format)
}

/// Text: one line per record. CSV: header from the union of keys in first
/// appearance order, `-` for missing fields.
fn render_records(cfg: &ExperimentConfig, records: &[Record], format: Format) -> String {
    let mut out = metadata(cfg, Vec::new()).join("\n");
    out.push('\n');
    match format {
        Format::Text => {
            for r in records {
                out.push_str(&r.to_line());
                out.push('\n');
            }
        }
        Format::Csv => {
            let mut keys: Vec<&'static str> = Vec::new();
            for r in records {
                for (k, _) in &r.0 {
                    if !keys.contains(k) {
                        keys.push(k);
                    }
                }
            }
            out.push_str(&keys.join(","));
            out.push('\n');
            for r in records {
                let line: Vec<&str> = keys.iter().map(|k| r.get(k).unwrap_or("-")).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
    }
    out
}

fn pass_str(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// Analytic value against its simulated estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub quantity: &'static str,
    pub analytic: f64,
    pub simulated: SimEstimate,
    pub tolerance: f64,
    pub passed: bool,
}

impl ValidationRow {
    fn new(quantity: &'static str, analytic: f64, simulated: SimEstimate, tolerance: f64) -> Self {
        ValidationRow {
            quantity,
            analytic,
            simulated,
            tolerance,
            passed: (simulated.estimate - analytic).abs() <= tolerance,
        }
    }

    pub fn record(&self) -> Record {
        Record::new()
            .with("quantity", self.quantity)
            .with("analytic", self.analytic)
            .with("simulated", self.simulated.estimate)
            .with("std_error", self.simulated.std_error)
            .with("tolerance", self.tolerance)
            .with("samples", self.simulated.trials)
            .with("status", pass_str(self.passed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub empty_windows: u64,
    pub passed: bool,
}

/// Cross-checks the analytic model against simulation at the configured
/// operating point (first catalog size, `transmit_power`).
///
/// Tolerances: coverage `max(3·SE, 0.005)`, hit rate and APC `3·SE`, EE
/// `max(3·SE, 2%)`. `mc_gamma_perturbation` shifts `γ` in the simulation
/// only, which must make the coverage rows fail.
pub fn run_mc_validate(cfg: &ExperimentConfig) -> Result<ValidationReport, ConfigError> {
    let p = cfg.transmit_power;
    let f0 = cfg.f0[0];
    let network = cfg.network();
    let power = cfg.power(p, f0)?;
    let mut sim_network = network;
    sim_network.gamma += cfg.mc_gamma_perturbation;
    let sim = |net| -> Result<SimConfig, ConfigError> {
        let c = SimConfig::new(net, power, cfg.trials, cfg.seed)?;
        Ok(match cfg.window_radius {
            Some(r) => c.with_window_radius(r),
            None => c,
        })
    };

    let mut rows = Vec::new();
    let quiet = network.with_noise(NoiseModel::NOISELESS);
    let est = montecarlo::estimate_coverage(&sim(sim_network.with_noise(NoiseModel::NOISELESS))?);
    let mut empty = est.empty_windows;
    rows.push(ValidationRow::new(
        "coverage_noise_free",
        coverage_nn(&quiet),
        est.coverage,
        (3.0 * est.coverage.std_error).max(0.005),
    ));

    let sim_cfg = sim(sim_network)?;
    let est = montecarlo::estimate_coverage(&sim_cfg);
    empty += est.empty_windows;
    let exact = coverage_exact(&CoverageQuery::new(network, p)?)?;
    rows.push(ValidationRow::new(
        "coverage",
        exact,
        est.coverage,
        (3.0 * est.coverage.std_error).max(0.005),
    ));

    let mc = montecarlo::apc_ee_with_coverage(&sim_cfg, est.coverage, cfg.requests)?;
    let eta = network.eta();
    rows.push(ValidationRow::new(
        "hit_rate",
        cache::hit_probability(f0, eta),
        mc.hit_rate,
        3.0 * mc.hit_rate.std_error,
    ));
    let apc = network.lambda_b * cache::total_power_cached(&power, eta);
    rows.push(ValidationRow::new(
        "apc",
        apc,
        mc.apc,
        (3.0 * mc.apc.std_error).max(1e-12 * apc),
    ));
    let q = EeQuery::new(power, network, NoiseCorrection::LowNoise)?;
    let ee = metrics::ee_cached(&q, p);
    rows.push(ValidationRow::new(
        "ee",
        ee,
        mc.ee,
        (3.0 * mc.ee.std_error).max(0.02 * ee.abs()),
    ));

    let passed = rows.iter().all(|r| r.passed);
    Ok(ValidationReport {
        rows,
        empty_windows: empty,
        passed,
    })
}
