//! Content popularity, cache hit/miss probabilities and per-BS power.
//!
//! Popularity follows the continuous power law `f_pop(f) = (η−1) f^(−η)` on
//! `f ≥ 1`; a BS caching the catalog `[1, f₀]` serves a request locally with
//! probability `1 − f₀^(1−η)`.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopularityModel {
    /// Steepness `η > 1`.
    pub eta: f64,
}

impl PopularityModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 1.0) || eta.is_nan() {
            return Err(Error::param("eta", format!("{eta} must exceed 1")));
        }
        Ok(PopularityModel { eta })
    }

    pub fn pdf(&self, f: f64) -> f64 {
        if f < 1.0 {
            0.0
        } else {
            (self.eta - 1.0) * f.powf(-self.eta)
        }
    }

    pub fn cdf(&self, f: f64) -> f64 {
        if f < 1.0 {
            0.0
        } else {
            1.0 - f.powf(1.0 - self.eta)
        }
    }

    /// `F⁻¹(u) = (1−u)^(−1/(η−1))`.
    pub fn quantile(&self, u: f64) -> f64 {
        (1.0 - u).powf(-1.0 / (self.eta - 1.0))
    }
}

/// Probability that a request falls inside the cached catalog `[1, f₀]`.
pub fn hit_probability(f0: f64, eta: f64) -> f64 {
    1.0 - miss_probability(f0, eta)
}

/// `f₀^(1−η)`.
pub fn miss_probability(f0: f64, eta: f64) -> f64 {
    f0.powf(1.0 - eta)
}

/// Draws a continuous content rank by inverse-CDF sampling.
pub fn sample_content_rank<R: Rng + ?Sized>(model: &PopularityModel, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    model.quantile(u)
}

/// Per-BS power components. `transmit` is the operating point used when a
/// caller does not supply a transmit power explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CachePowerParams {
    /// Transmit power `P` (W).
    pub transmit: f64,
    /// Operational charge `P_o` (W).
    pub operational: f64,
    /// Local disk retrieval power `P_hd` (W), paid on a hit.
    pub disk: f64,
    /// Backhaul retrieval power `P_bh` (W), paid on a miss.
    pub backhaul: f64,
    /// Catalog size `f₀ ≥ 1`.
    pub catalog: f64,
}

impl CachePowerParams {
    pub fn new(transmit: f64, operational: f64, disk: f64, backhaul: f64, catalog: f64) -> Result<Self> {
        let p = CachePowerParams {
            transmit,
            operational,
            disk,
            backhaul,
            catalog,
        };
        p.check()?;
        Ok(p)
    }

    /// Builds the components from the aggregates `P_s = P_o + P_hd` and
    /// `P_d = P_bh − P_hd`, taking `P_hd = 0`.
    pub fn from_aggregates(transmit: f64, static_power: f64, backhaul_premium: f64, catalog: f64) -> Result<Self> {
        Self::new(transmit, static_power, 0.0, backhaul_premium, catalog)
    }

    fn check(&self) -> Result<()> {
        let fields = [
            ("transmit", self.transmit),
            ("operational", self.operational),
            ("disk", self.disk),
            ("backhaul", self.backhaul),
            ("catalog", self.catalog),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::param(name, format!("{v} is not finite")));
            }
        }
        if self.transmit < 0.0 || self.operational < 0.0 || self.disk < 0.0 {
            return Err(Error::param("power", "components must be non-negative"));
        }
        if !(self.backhaul > self.disk) {
            return Err(Error::param(
                "backhaul",
                format!("P_bh = {} must exceed P_hd = {}", self.backhaul, self.disk),
            ));
        }
        if !(self.catalog >= 1.0) {
            return Err(Error::param("catalog", format!("f0 = {} must be >= 1", self.catalog)));
        }
        Ok(())
    }

    /// `P_s = P_o + P_hd`.
    pub fn static_power(&self) -> f64 {
        self.operational + self.disk
    }

    /// `P_d = P_bh − P_hd`.
    pub fn backhaul_premium(&self) -> f64 {
        self.backhaul - self.disk
    }

    pub fn with_transmit(mut self, transmit: f64) -> Self {
        self.transmit = transmit;
        self
    }

    pub fn with_catalog(mut self, catalog: f64) -> Result<Self> {
        self.catalog = catalog;
        self.check()?;
        Ok(self)
    }
}

/// `P + P_s + P_d·f₀^(1−η)`.
pub fn total_power_cached(p: &CachePowerParams, eta: f64) -> f64 {
    p.transmit + p.static_power() + p.backhaul_premium() * miss_probability(p.catalog, eta)
}

/// `P + P_s + P_d`: every request goes over the backhaul.
pub fn total_power_uncached(p: &CachePowerParams) -> f64 {
    p.transmit + p.static_power() + p.backhaul_premium()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadConfig};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hit_probability_values() {
        assert_eq!(hit_probability(1.0, 1.7), 0.0);
        assert_relative_eq!(hit_probability(10.0, 2.0), 0.9, max_relative = 1e-15);
        // Quadrature of the PDF over [1, 10].
        let model = PopularityModel::new(2.0).unwrap();
        let cfg = QuadConfig::default().with_abs_tol(1e-13);
        let mass = integrate(|f| model.pdf(f), 1.0, 10.0, &cfg).unwrap().value;
        assert_relative_eq!(mass, 0.9, max_relative = 1e-12);
        assert!(hit_probability(1e25, 1.2) > 0.9999);
    }

    #[test]
    fn miss_probability_values() {
        assert_relative_eq!(miss_probability(10.0, 1.2), 0.630_957_344_480_193_2, max_relative = 1e-14);
        assert_relative_eq!(miss_probability(10.0, 1.2), 1.0 - hit_probability(10.0, 1.2), max_relative = 1e-14);
        assert_eq!(miss_probability(1.0, 3.0), 1.0);
        assert_eq!(miss_probability(2.0, 1e6), 0.0);
    }

    #[test]
    fn pdf_has_unit_mass() {
        let model = PopularityModel::new(2.5).unwrap();
        let cfg = QuadConfig::default().with_abs_tol(0.0).with_rel_tol(1e-10);
        let mass = crate::quadrature::integrate_semi_infinite(|f| model.pdf(f), 1.0, &cfg).unwrap();
        assert_relative_eq!(mass.value, 1.0, max_relative = 1e-9);
        assert_eq!(model.pdf(0.5), 0.0);
        assert!(PopularityModel::new(1.0).is_err());
    }

    #[test]
    fn quantile_values() {
        let model = PopularityModel::new(2.0).unwrap();
        assert_eq!(model.quantile(0.0), 1.0);
        assert_relative_eq!(model.quantile(0.9), 10.0, max_relative = 1e-12);
        assert_relative_eq!(model.cdf(model.quantile(0.37)), 0.37, max_relative = 1e-12);
    }

    #[test]
    fn empirical_hit_rate() {
        let model = PopularityModel::new(1.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| sample_content_rank(&model, &mut rng) <= 10.0)
            .count() as f64;
        let p = hit_probability(10.0, 1.2);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits / n as f64 - p).abs() <= 3.0 * se);
        assert!((hits / n as f64 - 0.369).abs() < 0.002);
    }

    #[test]
    fn sampled_cdf_at_quantiles() {
        let model = PopularityModel::new(2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_content_rank(&model, &mut rng)).collect();
        for u in [0.25, 0.5, 0.9] {
            let x = model.quantile(u);
            let emp = draws.iter().filter(|&&d| d <= x).count() as f64 / n as f64;
            let se = (u * (1.0 - u) / n as f64).sqrt();
            assert!((emp - u).abs() <= 4.0 * se, "u={u}: {emp}");
        }
    }

    fn fig_params(catalog: f64) -> CachePowerParams {
        CachePowerParams::from_aggregates(50.0, 25.0, 10.0, catalog).unwrap()
    }

    #[test]
    fn total_power_values() {
        assert_relative_eq!(total_power_cached(&fig_params(10.0), 1.2), 81.309_573_444_801_93, max_relative = 1e-14);
        assert_eq!(total_power_uncached(&fig_params(10.0)), 85.0);
        assert_eq!(total_power_cached(&fig_params(1.0), 1.2), total_power_uncached(&fig_params(1.0)));
        assert_relative_eq!(total_power_cached(&fig_params(1e300), 1.5), 75.0, max_relative = 1e-14);
    }

    #[test]
    fn components_aggregate() {
        let p = CachePowerParams::new(10.0, 20.0, 5.0, 15.0, 100.0).unwrap();
        assert_eq!(p.static_power(), 25.0);
        assert_eq!(p.backhaul_premium(), 10.0);
        assert!(CachePowerParams::new(10.0, 20.0, 5.0, 5.0, 100.0).is_err());
        assert!(CachePowerParams::new(10.0, 20.0, 5.0, 6.0, 0.5).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hit_plus_miss_is_one(f0 in 1.0f64..1e9, eta in 1.0001f64..50.0) {
                prop_assert!((hit_probability(f0, eta) + miss_probability(f0, eta) - 1.0).abs() <= 1e-15);
            }

            #[test]
            fn miss_decreasing(f0 in 1.01f64..1e6, df in 1.01f64..10.0, eta in 1.01f64..5.0, de in 0.01f64..3.0) {
                prop_assert!(miss_probability(f0 * df, eta) < miss_probability(f0, eta));
                prop_assert!(miss_probability(f0, eta + de) < miss_probability(f0, eta));
            }

            #[test]
            fn caching_saves_power(
                p in 0.0f64..200.0, ps in 0.0f64..100.0, pd in 0.01f64..100.0,
                f0 in 1.001f64..1e4, eta in 1.01f64..10.0,
            ) {
                let params = CachePowerParams::from_aggregates(p, ps, pd, f0).unwrap();
                prop_assert!(total_power_cached(&params, eta) < total_power_uncached(&params));
                let flat = params.with_catalog(1.0).unwrap();
                prop_assert_eq!(total_power_cached(&flat, eta), total_power_uncached(&flat));
            }
        }
    }
}
