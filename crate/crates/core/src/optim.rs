//! Optimizers for the APC and EE objectives.
//!
//! Closed forms and bounds come straight from the stationarity conditions;
//! every one of them is paired with a derivative-free golden-section search
//! so the two routes can be compared.

use std::fmt;

use crate::error::{Error, Result};
use crate::metrics::{self, ApcQuery, CacheMode, DensityRule, EeQuery};

/// `1/φ`.
const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_GOLDEN_ITERS: usize = 400;

/// Upper limit on the transmit power explored by bracket expansion (W).
pub const BRACKET_CAP: f64 = 1e9;

/// Relative bracket width at which golden-section search stops:
/// `b − a ≤ GOLDEN_TOL · (1 + |x|)`.
pub const GOLDEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub argument: f64,
    pub value: f64,
    /// Final bracket.
    pub bracket: (f64, f64),
    /// Bracket the search started from.
    pub initial_bracket: (f64, f64),
    pub evaluations: usize,
    pub converged: bool,
}

/// Golden-section minimization of `f` on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> ScalarOptimum {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let initial_bracket = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    let mut converged = false;
    for _ in 0..MAX_GOLDEN_ITERS {
        let mid = 0.5 * (a + b);
        if b - a <= GOLDEN_TOL * (1.0 + mid.abs()) {
            converged = true;
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (argument, value) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    ScalarOptimum {
        argument,
        value,
        bracket: (a, b),
        initial_bracket,
        evaluations,
        converged,
    }
}

/// Finds `lo < mid < hi` with `f(mid)` below both ends by geometric
/// expansion from `start`, never going below `floor` nor above `cap`.
pub fn bracket_minimum<F: Fn(f64) -> f64>(f: &F, start: f64, floor: f64, cap: f64) -> Result<(f64, f64)> {
    const GROW: f64 = 2.0;
    let mut mid = start;
    let mut f_mid = f(mid);
    let mut lo = floor.max(mid / GROW);
    let mut hi = mid * GROW;
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);

    while f_lo < f_mid {
        hi = mid;
        mid = lo;
        f_mid = f_lo;
        let next = floor.max(lo / GROW);
        if next >= lo {
            // Still improving towards the floor: the minimum is on it.
            return Ok((floor, hi));
        }
        lo = next;
        f_lo = f(lo);
    }
    while f_hi < f_mid {
        lo = mid;
        mid = hi;
        f_mid = f_hi;
        if hi >= cap {
            return Err(Error::BracketFailure { cap });
        }
        hi = (hi * GROW).min(cap);
        f_hi = f(hi);
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Reported argument is an exact stationary point.
    ClosedForm,
    /// Numeric optimum, checked against an analytic bound.
    Bound,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Bound => "bound",
            Method::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Apc(CacheMode),
    Ee(CacheMode),
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Apc(m) => write!(f, "apc_{}", m.as_str()),
            Objective::Ee(m) => write!(f, "ee_{}", m.as_str()),
        }
    }
}

/// Optimum of one objective by every available route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumReport {
    pub objective: Objective,
    /// Reported optimal transmit power `P*` (W).
    pub argument: f64,
    /// Objective at `argument`.
    pub value: f64,
    pub method: Method,
    /// Golden-section result, always present.
    pub numeric: ScalarOptimum,
    /// Exact stationary point for the configured parameters.
    pub closed_form: Option<f64>,
    /// EE only: the `c = 1` form `1 + √(1 + K)`.
    pub paper_closed_form: Option<f64>,
    /// Cached APC only: `2P_s/ε`, which `P*` must exceed.
    pub lower_bound: Option<f64>,
    /// EE only: correction coefficient `c` in force.
    pub correction: Option<f64>,
}

impl OptimumReport {
    /// `|closed − numeric| / closed`, when a closed form exists.
    pub fn agreement(&self) -> Option<f64> {
        self.closed_form
            .map(|c| (c - self.numeric.argument).abs() / c.abs())
    }

    /// Whether the numeric optimum lies strictly above the lower bound.
    pub fn exceeds_bound(&self) -> Option<bool> {
        self.lower_bound.map(|b| self.numeric.argument > b)
    }
}

/// Minimizes APC over the transmit power under the QoS-boundary density.
///
/// Uncached: `P* = 2(P_s + P_d)/ε`, confirmed numerically. Cached: numeric
/// search started from the bound `2P_s/ε`.
pub fn minimize_apc(q: &ApcQuery) -> Result<OptimumReport> {
    if !matches!(q.density, DensityRule::QosBoundary { .. }) {
        return Err(Error::param(
            "density",
            "APC at a fixed density increases with P; minimize under the QoS boundary",
        ));
    }
    let eps = q.epsilon();
    if !(eps > 0.0) {
        return Err(Error::NoMinimum { epsilon: eps });
    }
    let ps = q.power.static_power();
    let pd = q.power.backhaul_premium();
    let f = |p: f64| metrics::apc(q, p);

    let report = match q.mode {
        CacheMode::Uncached => {
            let closed = 2.0 * (ps + pd) / eps;
            let (lo, hi) = bracket_minimum(&f, closed, 0.0, BRACKET_CAP)?;
            let numeric = golden_section(f, lo, hi);
            OptimumReport {
                objective: Objective::Apc(q.mode),
                argument: closed,
                value: f(closed),
                method: Method::ClosedForm,
                numeric,
                closed_form: Some(closed),
                paper_closed_form: None,
                lower_bound: None,
                correction: None,
            }
        }
        CacheMode::Cached => {
            let bound = 2.0 * ps / eps;
            let start = if bound > 0.0 { bound } else { 1.0 };
            let (lo, hi) = bracket_minimum(&f, start, 0.0, BRACKET_CAP)?;
            let numeric = golden_section(f, lo, hi);
            OptimumReport {
                objective: Objective::Apc(q.mode),
                argument: numeric.argument,
                value: numeric.value,
                method: Method::Bound,
                numeric,
                closed_form: None,
                paper_closed_form: None,
                lower_bound: Some(bound),
                correction: None,
            }
        }
    };
    Ok(report)
}

/// Maximizes EE over the transmit power at fixed density.
///
/// The stationary condition `P² − 2cP − cK = 0` gives `P* = c + √(c² + cK)`
/// with `K` the non-transmit power; `c = 1` recovers `1 + √(1 + K)`.
pub fn maximize_ee(q: &EeQuery, mode: CacheMode) -> Result<OptimumReport> {
    let c = q.coefficient();
    if !(c > 0.0) {
        return Err(Error::param(
            "correction",
            "EE has no interior maximum without a noise correction (c = 0)",
        ));
    }
    let k = q.fixed_power(mode);
    let closed = c + (c * c + c * k).sqrt();
    let paper = 1.0 + (1.0 + k).sqrt();
    let neg = |p: f64| -metrics::ee(q, mode, p);
    let (lo, hi) = bracket_minimum(&neg, closed, c, BRACKET_CAP)?;
    let mut numeric = golden_section(neg, lo, hi);
    numeric.value = -numeric.value;
    Ok(OptimumReport {
        objective: Objective::Ee(mode),
        argument: closed,
        value: metrics::ee(q, mode, closed),
        method: Method::ClosedForm,
        numeric,
        closed_form: Some(closed),
        paper_closed_form: Some(paper),
        lower_bound: None,
        correction: Some(c),
    })
}
