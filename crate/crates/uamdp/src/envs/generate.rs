//! Synthetic data generators with hidden regime structure. These stand in
//! for real market and retail feeds so every experiment is reproducible
//! from a seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::belief::LatentParam;

/// Hidden-Markov regime structure shared by both generators.
///
/// For markets each regime's params are `[drift, volatility]`; for demand
/// they are `[demand_mean, promo_lift, season_amplitude]`. `transition` is
/// the per-step probability of switching to a different regime (uniform
/// over the others).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeModel {
    pub regimes: Vec<LatentParam>,
    pub transition: f64,
}

impl RegimeModel {
    pub fn new(regimes: Vec<LatentParam>, transition: f64) -> Self {
        assert!(!regimes.is_empty(), "need at least one regime");
        assert!((0.0..=1.0).contains(&transition));
        Self { regimes, transition }
    }

    fn step_regime(&self, current: usize, rng: &mut ChaCha8Rng) -> usize {
        if self.regimes.len() < 2 || !rng.gen_bool(self.transition) {
            return current;
        }
        let mut next = rng.gen_range(0..self.regimes.len() - 1);
        if next >= current {
            next += 1;
        }
        next
    }
}

/// Fixed parameters of the synthetic bond leg (independent low-volatility
/// stream, not regime-dependent).
pub const BOND_DRIFT: f64 = 1e-4;
pub const BOND_VOL: f64 = 2e-3;

/// One generated market path. `regimes` carries the hidden labels for
/// diagnostics only; agents never see them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarketPath {
    pub prices: Vec<f64>,
    pub bond_prices: Vec<f64>,
    pub highs: Vec<f64>,
    pub lows: Vec<f64>,
    pub volumes: Vec<f64>,
    pub regimes: Vec<usize>,
}

impl MarketPath {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn log_return(&self, t: usize) -> f64 {
        (self.prices[t] / self.prices[t - 1]).ln()
    }

    pub fn bond_log_return(&self, t: usize) -> f64 {
        (self.bond_prices[t] / self.bond_prices[t - 1]).ln()
    }

    /// CSV dump with the hidden regime label, for offline inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,price,bond_price,high,low,volume,regime\n");
        for t in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t,
                self.prices[t],
                self.bond_prices[t],
                self.highs[t],
                self.lows[t],
                self.volumes[t],
                self.regimes[t]
            ));
        }
        out
    }
}

/// Geometric random walk with regime-dependent drift and volatility.
/// Deterministic given the seed.
pub fn generate_market(model: &RegimeModel, length: usize, rng_seed: u64) -> MarketPath {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut prices = Vec::with_capacity(length);
    let mut bond_prices = Vec::with_capacity(length);
    let mut highs = Vec::with_capacity(length);
    let mut lows = Vec::with_capacity(length);
    let mut volumes = Vec::with_capacity(length);
    let mut regimes = Vec::with_capacity(length);

    let mut regime = 0usize;
    let mut price = 100.0f64;
    let mut bond = 100.0f64;
    for t in 0..length {
        if t > 0 {
            regime = model.step_regime(regime, &mut rng);
        }
        let params = &model.regimes[regime].params;
        let (drift, vol) = (params[0], params[1]);

        let prev = price;
        if t > 0 {
            let z: f64 = rng.sample(StandardNormal);
            price *= (drift + vol * z).exp();
            let zb: f64 = rng.sample(StandardNormal);
            bond *= (BOND_DRIFT + BOND_VOL * zb).exp();
        }
        let eh: f64 = rng.sample(StandardNormal);
        let el: f64 = rng.sample(StandardNormal);
        let high = price.max(prev) * (1.0 + 0.5 * vol * eh.abs());
        let low = price.min(prev) * (1.0 - 0.5 * vol * el.abs());
        let zv: f64 = rng.sample(StandardNormal);
        let volume = (13.8 + 0.3 * zv).exp(); // ~1e6 shares, lognormal

        prices.push(price);
        bond_prices.push(bond);
        highs.push(high);
        lows.push(low);
        volumes.push(volume);
        regimes.push(regime);
    }
    MarketPath { prices, bond_prices, highs, lows, volumes, regimes }
}

/// One generated demand path. Prices dip to 80% of base on promo days.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemandPath {
    pub demand: Vec<u32>,
    pub prices: Vec<f64>,
    pub promos: Vec<bool>,
    pub regimes: Vec<usize>,
}

impl DemandPath {
    pub fn len(&self) -> usize {
        self.demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand.is_empty()
    }

    /// CSV dump with the hidden regime label, for offline inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,demand,price,promo,regime\n");
        for t in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t,
                self.demand[t],
                self.prices[t],
                u8::from(self.promos[t]),
                self.regimes[t]
            ));
        }
        out
    }
}

/// Seasonal mean of the demand process at day `t` for a hypothesis with
/// params `[mean, promo_lift, season_amplitude]`.
pub fn seasonal_rate(params: &[f64], t: usize, promo: bool) -> f64 {
    let (mean, lift, amplitude) = (params[0], params[1], params[2]);
    let season = 1.0 + amplitude * (2.0 * std::f64::consts::PI * t as f64 / 365.0).sin();
    let base = mean * season.max(0.0);
    if promo {
        base * lift
    } else {
        base
    }
}

/// Poisson demand around a seasonal, promo-lifted mean with hidden regime
/// switching, using the default 15% promo frequency.
pub fn generate_demand(model: &RegimeModel, length: usize, rng_seed: u64) -> DemandPath {
    generate_demand_with(model, length, rng_seed, 0.15)
}

/// Same generator with an explicit promo-day probability.
pub fn generate_demand_with(
    model: &RegimeModel,
    length: usize,
    rng_seed: u64,
    promo_prob: f64,
) -> DemandPath {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let base_price = 10.0;
    let mut demand = Vec::with_capacity(length);
    let mut prices = Vec::with_capacity(length);
    let mut promos = Vec::with_capacity(length);
    let mut regimes = Vec::with_capacity(length);

    let mut regime = 0usize;
    for t in 0..length {
        if t > 0 {
            regime = model.step_regime(regime, &mut rng);
        }
        let promo = rng.gen_bool(promo_prob.clamp(0.0, 1.0));
        let rate = seasonal_rate(&model.regimes[regime].params, t, promo);
        let d = if rate > 0.0 {
            Poisson::new(rate).expect("positive rate").sample(&mut rng) as u32
        } else {
            0
        };
        let price = if promo { base_price * 0.8 } else { base_price };
        demand.push(d);
        prices.push(price);
        promos.push(promo);
        regimes.push(regime);
    }
    DemandPath { demand, prices, promos, regimes }
}
