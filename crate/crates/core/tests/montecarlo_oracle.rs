use greencache::cache::{self, CachePowerParams};
use greencache::coverage::{coverage_exact, coverage_nn, CoverageQuery};
use greencache::metrics::{ee_cached, EeQuery, NoiseCorrection};
use greencache::montecarlo::{estimate_apc_ee, estimate_coverage, estimate_hit_rate, window_convergence};
use greencache::network::{NetworkParams, NoiseModel};
use greencache::SimConfig;

const TRIALS: u64 = 200_000;

fn config(lambda_b: f64, lambda_u: f64, alpha: f64, beta: f64, transmit: f64, f0: f64) -> SimConfig {
    let net = NetworkParams::new(lambda_b, lambda_u, alpha, 2.0, NoiseModel::Beta(beta));
    let power = CachePowerParams::from_aggregates(transmit, 25.0, 10.0, f0).unwrap();
    SimConfig::new(net, power, TRIALS, 2024).unwrap()
}

#[test]
fn noise_free_coverage_matches_closed_form() {
    let cfg = config(1.0, 2.0, 4.0, 0.0, 1.0, 10.0);
    let analytic = coverage_nn(&cfg.network);
    assert!((analytic - 0.450_158).abs() < 1e-6);
    let est = estimate_coverage(&cfg);
    assert!(est.coverage.agrees_with(analytic, 3.0, 0.005), "{est:?}");
}

#[test]
fn noisy_coverage_matches_quadrature() {
    let cfg = config(1.0, 2.0, 4.0, 1.0, 50.0, 10.0);
    let analytic = coverage_exact(&CoverageQuery::new(cfg.network, 50.0).unwrap()).unwrap();
    let est = estimate_coverage(&cfg);
    assert!(est.coverage.agrees_with(analytic, 3.0, 0.004), "{est:?} vs {analytic}");
}

#[test]
fn doubling_window_barely_moves_coverage() {
    for (alpha, beta) in [(4.0, 0.0), (4.75, 1.0), (6.0, 0.0)] {
        let cfg = config(1.0, 2.0, alpha, beta, 50.0, 10.0).with_trials(20_000);
        let w = window_convergence(&cfg);
        assert!(w.difference.abs() < 0.002, "alpha={alpha}: {w:?}");
    }
}

#[test]
fn coverage_depends_on_density_through_scaled_power() {
    // With σ² = βλ_b the model is invariant under λ_b → sλ_b, P → P·s^(1−α/2).
    let alpha = 4.75;
    let a = config(0.5, 2.0, alpha, 1.0, 5.0, 10.0).with_trials(100_000);
    let p2 = 5.0 * 4f64.powf(1.0 - alpha / 2.0);
    let mut b = config(2.0, 4.0, alpha, 1.0, p2, 10.0).with_trials(100_000);
    b.seed = 99;
    let (ea, eb) = (estimate_coverage(&a).coverage, estimate_coverage(&b).coverage);
    let se = (ea.std_error.powi(2) + eb.std_error.powi(2)).sqrt();
    assert!((ea.estimate - eb.estimate).abs() <= 3.0 * se, "{ea:?} vs {eb:?}");
}

#[test]
fn hit_rate_grid() {
    for f0 in [10.0, 100.0] {
        for eta in [1.2, 2.0, 5.0] {
            let cfg = config(1.0, eta, 4.0, 0.0, 1.0, f0);
            let est = estimate_hit_rate(&cfg, 1_000_000).unwrap();
            let p = cache::hit_probability(f0, eta);
            let se = (p * (1.0 - p) / 1e6).sqrt();
            assert!((est.estimate - p).abs() <= 3.0 * se, "f0={f0} eta={eta}: {est:?} vs {p}");
        }
    }
}

#[test]
fn simulated_power_and_ee_match_analytic() {
    let cfg = config(0.5, 0.6, 4.75, 1.0, 50.0, 10.0).with_trials(100_000);
    let est = estimate_apc_ee(&cfg, 1_000_000).unwrap();
    let total = cache::total_power_cached(&cfg.power, cfg.network.eta());
    assert!(est.total_power.agrees_with(total, 3.0, 0.0), "{est:?} vs {total}");
    let q = EeQuery::new(cfg.power, cfg.network, NoiseCorrection::LowNoise).unwrap();
    let analytic = ee_cached(&q, 50.0);
    let tol = (3.0 * est.ee.std_error).max(0.02 * analytic);
    assert!((est.ee.estimate - analytic).abs() <= tol, "{:?} vs {analytic}", est.ee);
}
