//! Feature engineering for the trading and inventory observation streams.
//!
//! Both builders return a fixed-order, fixed-length vector; the layout is
//! exposed as data (`trading_layout` / `inventory_layout`) and shipped as a
//! JSON schema next to the crate so downstream consumers never have to
//! hard-code column positions. Continuous columns are z-scored with
//! training-window statistics via [`FeatureScaler`]; indicator and cyclical
//! columns pass through unscaled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Trading features need this many leading observations before the largest
/// rolling window (60 returns) is populated.
pub const TRADING_WARMUP: usize = 60;
/// Inventory features need the 28-day demand window.
pub const INVENTORY_WARMUP: usize = 28;
/// Phase length of the sine–cosine trading clock.
pub const TRADING_CLOCK_PERIOD: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("index {t} is inside the warm-up window ({warmup} observations required)")]
    WarmupInsufficient { t: usize, warmup: usize },
    #[error("series too short: index {t} not covered by length {len}")]
    OutOfRange { t: usize, len: usize },
    #[error("input series have inconsistent lengths")]
    LengthMismatch,
}

/// One column of a feature vector. `scale` marks columns that participate
/// in z-scoring (indicators and cyclical encodings do not).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub scale: bool,
}

fn spec(name: impl Into<String>, scale: bool) -> FeatureSpec {
    FeatureSpec { name: name.into(), scale }
}

/// Column layout of [`features_trading`], in output order.
pub fn trading_layout() -> Vec<FeatureSpec> {
    let mut cols = vec![
        spec("log_return", true),
        spec("true_range", true),
        spec("dollar_volume", true),
    ];
    for w in [5usize, 20, 60] {
        cols.push(spec(format!("ret_mean_{w}"), true));
    }
    for w in [5usize, 20, 60] {
        cols.push(spec(format!("ret_sd_{w}"), true));
    }
    cols.push(spec("ema_12", true));
    cols.push(spec("ema_26", true));
    cols.push(spec("macd", true));
    cols.push(spec("clock_sin", false));
    cols.push(spec("clock_cos", false));
    for lag in 1..=5usize {
        cols.push(spec(format!("log_return_lag{lag}"), true));
        cols.push(spec(format!("true_range_lag{lag}"), true));
        cols.push(spec(format!("dollar_volume_lag{lag}"), true));
    }
    cols.push(spec("macd_lag1", true));
    cols
}

/// Column layout of [`features_inventory`], in output order.
pub fn inventory_layout() -> Vec<FeatureSpec> {
    let mut cols = vec![
        spec("demand_log_growth", true),
        spec("price_rel_change", true),
        spec("promo_flag", false),
    ];
    for w in [7usize, 28] {
        cols.push(spec(format!("demand_mean_{w}"), true));
        cols.push(spec(format!("demand_median_{w}"), true));
        cols.push(spec(format!("demand_sd_{w}"), true));
    }
    cols.push(spec("log_demand_ewma_14", true));
    cols.push(spec("week_sin", false));
    cols.push(spec("week_cos", false));
    for lag in 1..=4usize {
        cols.push(spec(format!("demand_log_growth_lag{lag}"), true));
        cols.push(spec(format!("price_rel_change_lag{lag}"), true));
        cols.push(spec(format!("promo_flag_lag{lag}"), false));
    }
    cols.push(spec("stockout_yesterday", false));
    cols
}

fn log_return(prices: &[f64], t: usize) -> f64 {
    (prices[t] / prices[t - 1]).ln()
}

fn true_range(highs: &[f64], lows: &[f64], prices: &[f64], t: usize) -> f64 {
    highs[t].max(prices[t - 1]) - lows[t].min(prices[t - 1])
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// EMA over `values[..=t]` with the given span (α = 2/(span+1)), seeded at
/// the first value.
fn ema(values: &[f64], t: usize, span: usize) -> f64 {
    let alpha = 2.0 / (span as f64 + 1.0);
    let mut e = values[0];
    for &v in &values[1..=t] {
        e = alpha * v + (1.0 - alpha) * e;
    }
    e
}

/// Trading feature vector at index `t` (see [`trading_layout`] for order).
///
/// Requires `t ≥ TRADING_WARMUP` so every rolling window is fully covered.
pub fn features_trading(
    prices: &[f64],
    highs: &[f64],
    lows: &[f64],
    volumes: &[f64],
    t: usize,
) -> Result<Vec<f64>, FeatureError> {
    let len = prices.len();
    if highs.len() != len || lows.len() != len || volumes.len() != len {
        return Err(FeatureError::LengthMismatch);
    }
    if t >= len {
        return Err(FeatureError::OutOfRange { t, len });
    }
    if t < TRADING_WARMUP {
        return Err(FeatureError::WarmupInsufficient { t, warmup: TRADING_WARMUP });
    }

    let r = |i: usize| log_return(prices, i);
    let tr = |i: usize| true_range(highs, lows, prices, i);
    let dv = |i: usize| volumes[i] * prices[i];

    let mut out = Vec::with_capacity(trading_layout().len());
    out.push(r(t));
    out.push(tr(t));
    out.push(dv(t));

    let returns: Vec<f64> = (1..=t).map(r).collect();
    for w in [5usize, 20, 60] {
        out.push(mean(&returns[returns.len() - w..]));
    }
    for w in [5usize, 20, 60] {
        out.push(sample_sd(&returns[returns.len() - w..]));
    }

    let ema12 = ema(prices, t, 12);
    let ema26 = ema(prices, t, 26);
    out.push(ema12);
    out.push(ema26);
    out.push(ema12 - ema26);

    let phase = 2.0 * std::f64::consts::PI * (t % TRADING_CLOCK_PERIOD) as f64
        / TRADING_CLOCK_PERIOD as f64;
    out.push(phase.sin());
    out.push(phase.cos());

    for lag in 1..=5usize {
        out.push(r(t - lag));
        out.push(tr(t - lag));
        out.push(dv(t - lag));
    }
    let ema12_prev = ema(prices, t - 1, 12);
    let ema26_prev = ema(prices, t - 1, 26);
    out.push(ema12_prev - ema26_prev);

    Ok(out)
}

/// Inventory feature vector at index `t` (see [`inventory_layout`]).
///
/// `backorders[i]` is the unfilled-demand counter at day `i`; it feeds only
/// the stockout-yesterday indicator `1{d_{t−1}=0 ∧ backorders_{t−1}>0}`.
pub fn features_inventory(
    demand: &[f64],
    prices: &[f64],
    backorders: &[f64],
    t: usize,
) -> Result<Vec<f64>, FeatureError> {
    let len = demand.len();
    if prices.len() != len || backorders.len() != len {
        return Err(FeatureError::LengthMismatch);
    }
    if t >= len {
        return Err(FeatureError::OutOfRange { t, len });
    }
    if t < INVENTORY_WARMUP {
        return Err(FeatureError::WarmupInsufficient { t, warmup: INVENTORY_WARMUP });
    }

    let g = |i: usize| (1.0 + demand[i]).ln() - (1.0 + demand[i - 1]).ln();
    let dp = |i: usize| (prices[i] - prices[i - 1]) / prices[i - 1];
    let promo = |i: usize| {
        let window = &prices[i + 1 - 7..=i];
        if prices[i] < median(window) {
            1.0
        } else {
            0.0
        }
    };

    let mut out = Vec::with_capacity(inventory_layout().len());
    out.push(g(t));
    out.push(dp(t));
    out.push(promo(t));

    for w in [7usize, 28] {
        let window = &demand[t + 1 - w..=t];
        out.push(mean(window));
        out.push(median(window));
        out.push(sample_sd(window));
    }

    let log_demand: Vec<f64> = demand.iter().map(|&d| (1.0 + d).ln()).collect();
    out.push(ema(&log_demand, t, 14));

    let week_of_year = (t / 7) % 52;
    let phase = 2.0 * std::f64::consts::PI * week_of_year as f64 / 52.0;
    out.push(phase.sin());
    out.push(phase.cos());

    for lag in 1..=4usize {
        out.push(g(t - lag));
        out.push(dp(t - lag));
        out.push(promo(t - lag));
    }

    let stockout_yesterday =
        if demand[t - 1] == 0.0 && backorders[t - 1] > 0.0 { 1.0 } else { 0.0 };
    out.push(stockout_yesterday);

    Ok(out)
}

/// Column-wise z-scoring fit on a training window of feature rows.
/// Columns flagged `scale: false` in the layout pass through unchanged.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureScaler {
    means: Vec<f64>,
    sds: Vec<f64>,
    scale_mask: Vec<bool>,
}

impl FeatureScaler {
    pub fn fit(rows: &[Vec<f64>], layout: &[FeatureSpec]) -> Self {
        let d = layout.len();
        let mut means = vec![0.0; d];
        let mut sds = vec![1.0; d];
        if !rows.is_empty() {
            let n = rows.len() as f64;
            for j in 0..d {
                let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
                means[j] = m;
                let ss: f64 = rows.iter().map(|r| (r[j] - m).powi(2)).sum();
                let sd = if rows.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
                sds[j] = if sd > 1e-12 { sd } else { 1.0 };
            }
        }
        Self {
            means,
            sds,
            scale_mask: layout.iter().map(|s| s.scale).collect(),
        }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &x)| {
                if self.scale_mask[j] {
                    (x - self.means[j]) / self.sds[j]
                } else {
                    x
                }
            })
            .collect()
    }
}
