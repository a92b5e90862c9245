//! Point, probabilistic, trading, and inventory evaluation metrics.
//!
//! Everything here is a pure function over immutable inputs. The
//! probabilistic block (CRPS, coverage, PIT/KS) treats predictions as
//! per-dimension Gaussians, matching the forecaster's diagonal form;
//! empirical predictive draws go through the sample-based CRPS estimator.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::forecaster::PredictiveDist;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("inputs must be non-empty and equal length")]
    BadInput,
    #[error("need at least {0} observations")]
    TooFew(usize),
    #[error("return series has zero standard deviation")]
    DegenerateSeries,
    #[error("sigma must be positive")]
    BadSigma,
    #[error("record dimensions disagree")]
    DimensionMismatch,
}

/// A forecast paired with its realized outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub predicted: PredictiveDist,
    pub actual: Vec<f64>,
    pub horizon: usize,
}

impl ForecastRecord {
    pub fn new(predicted: PredictiveDist, actual: Vec<f64>, horizon: usize) -> Result<Self, MetricsError> {
        if predicted.dim() != actual.len() {
            return Err(MetricsError::DimensionMismatch);
        }
        Ok(Self { predicted, actual, horizon })
    }
}

/// Daily portfolio values plus per-step rebalancing volume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquityCurve {
    pub values: Vec<f64>,
    pub turnover_per_step: Vec<f64>,
}

impl EquityCurve {
    pub fn returns(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
    }
}

/// Per-day inventory accounting for service metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InventoryTrace {
    pub demand: Vec<f64>,
    pub filled: Vec<f64>,
    pub end_on_hand: Vec<f64>,
    pub prices: Vec<f64>,
    pub unit_cost: f64,
}

pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    if pred.is_empty() || pred.len() != actual.len() {
        return Err(MetricsError::BadInput);
    }
    let mse = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).powi(2))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(mse.sqrt())
}

pub fn mae(pred: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    if pred.is_empty() || pred.len() != actual.len() {
        return Err(MetricsError::BadInput);
    }
    Ok(pred.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum::<f64>() / pred.len() as f64)
}

/// Symmetric MAPE on the 0–200% scale; exact-zero pairs contribute 0.
pub fn smape(pred: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    if pred.is_empty() || pred.len() != actual.len() {
        return Err(MetricsError::BadInput);
    }
    let total: f64 = pred
        .iter()
        .zip(actual)
        .map(|(&p, &a)| {
            let denom = p.abs() + a.abs();
            if denom == 0.0 {
                0.0
            } else {
                2.0 * (p - a).abs() / denom
            }
        })
        .sum();
    Ok(100.0 * total / pred.len() as f64)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Closed-form CRPS of a Gaussian forecast:
/// `σ·[z(2Φ(z)−1) + 2φ(z) − 1/√π]` with `z = (y−μ)/σ`.
pub fn crps_gaussian(mu: f64, sigma: f64, y: f64) -> Result<f64, MetricsError> {
    if sigma <= 0.0 || sigma.is_nan() {
        return Err(MetricsError::BadSigma);
    }
    let z = (y - mu) / sigma;
    let phi = std_normal().cdf(z);
    Ok(sigma * (z * (2.0 * phi - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::f64::consts::PI.sqrt()))
}

/// Exact sample-based CRPS: `mean|X−y| − ½·mean|X−X'|` over all ordered
/// pairs, computed in O(M log M) from the sorted samples.
pub fn crps_empirical(samples: &[f64], y: f64) -> Result<f64, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::BadInput);
    }
    let m = samples.len() as f64;
    let term1 = samples.iter().map(|x| (x - y).abs()).sum::<f64>() / m;
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Σ_{i<j}(x_(j) − x_(i)) via the rank identity Σ_k x_(k)·(2k − M − 1).
    let pair_sum: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| x * (2.0 * (k as f64 + 1.0) - m - 1.0))
        .sum();
    let term2 = pair_sum / (m * m); // = ½ · mean|X−X'| over ordered pairs
    Ok(term1 - term2)
}

/// Fraction of actuals inside the central `level` Gaussian interval
/// `mean ± z_{(1+level)/2}·σ`, pooled over records and dimensions.
pub fn coverage(records: &[ForecastRecord], level: f64) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::BadInput);
    }
    let z = std_normal().inverse_cdf(0.5 * (1.0 + level));
    let mut inside = 0usize;
    let mut total = 0usize;
    for rec in records {
        for ((&mu, &var), &y) in rec
            .predicted
            .means()
            .iter()
            .zip(rec.predicted.variances())
            .zip(&rec.actual)
        {
            if (y - mu).abs() <= z * var.sqrt() {
                inside += 1;
            }
            total += 1;
        }
    }
    Ok(inside as f64 / total as f64)
}

/// Probability integral transform of each record under its Gaussian
/// predictive, pooled over dimensions.
pub fn pit_values(records: &[ForecastRecord]) -> Vec<f64> {
    let n = std_normal();
    let mut out = Vec::new();
    for rec in records {
        for ((&mu, &var), &y) in rec
            .predicted
            .means()
            .iter()
            .zip(rec.predicted.variances())
            .zip(&rec.actual)
        {
            out.push(n.cdf((y - mu) / var.sqrt()));
        }
    }
    out
}

/// One-sample Kolmogorov–Smirnov test of the PIT values against
/// Uniform(0,1): returns `(statistic, asymptotic p-value)`.
pub fn pit_ks(records: &[ForecastRecord]) -> Result<(f64, f64), MetricsError> {
    let u = pit_values(records);
    if u.len() < 5 {
        return Err(MetricsError::TooFew(5));
    }
    Ok(ks_uniform(&u))
}

/// KS statistic and asymptotic p-value for arbitrary values in [0,1].
pub fn ks_uniform(u: &[f64]) -> (f64, f64) {
    let n = u.len();
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut d: f64 = 0.0;
    for (i, &ui) in sorted.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n as f64 - ui;
        let lo = ui - i as f64 / n as f64;
        d = d.max(hi).max(lo);
    }
    (d, kolmogorov_sf((n as f64).sqrt() * d))
}

/// Asymptotic Kolmogorov survival function
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`, truncated at 100 terms with a
/// 1e-10 tail cutoff, clamped to [0, 1].
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut total = 0.0;
    for k in 1..=100u32 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        let signed = if k % 2 == 1 { term } else { -term };
        total += signed;
        if term < 1e-10 {
            break;
        }
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Mean over sample standard deviation (n−1) of daily returns; zero
/// risk-free rate.
pub fn sharpe_daily(returns: &[f64]) -> Result<f64, MetricsError> {
    if returns.len() < 2 {
        return Err(MetricsError::TooFew(2));
    }
    let mean = returns.iter().sum::<f64>() / returns.len() as f64;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
        / (returns.len() as f64 - 1.0);
    if var <= 0.0 {
        return Err(MetricsError::DegenerateSeries);
    }
    Ok(mean / var.sqrt())
}

/// Worst peak-to-trough ratio minus one: `min_t V_t / max_{τ≤t} V_τ − 1`,
/// always ≤ 0.
pub fn max_drawdown(curve: &EquityCurve) -> Result<f64, MetricsError> {
    if curve.values.is_empty() {
        return Err(MetricsError::BadInput);
    }
    let mut peak = curve.values[0];
    let mut worst = 0.0f64;
    for &v in &curve.values {
        peak = peak.max(v);
        worst = worst.min(v / peak - 1.0);
    }
    Ok(worst)
}

/// Average per-step rebalancing volume (L1 weight change halved, as
/// recorded by the environment).
pub fn turnover(curve: &EquityCurve) -> Result<f64, MetricsError> {
    if curve.turnover_per_step.is_empty() {
        return Err(MetricsError::BadInput);
    }
    Ok(curve.turnover_per_step.iter().sum::<f64>() / curve.turnover_per_step.len() as f64)
}

/// Fraction of strictly positive daily returns.
pub fn positive_days(curve: &EquityCurve) -> Result<f64, MetricsError> {
    let rets = curve.returns();
    if rets.is_empty() {
        return Err(MetricsError::BadInput);
    }
    Ok(rets.iter().filter(|&&r| r > 0.0).count() as f64 / rets.len() as f64)
}

/// Filled over total demand (1.0 when nothing was demanded).
pub fn service_level(trace: &InventoryTrace) -> Result<f64, MetricsError> {
    if trace.demand.is_empty() || trace.demand.len() != trace.filled.len() {
        return Err(MetricsError::BadInput);
    }
    let demand: f64 = trace.demand.iter().sum();
    let filled: f64 = trace.filled.iter().sum();
    Ok(if demand == 0.0 { 1.0 } else { filled / demand })
}

/// Mean unmet units per day.
pub fn stockout_rate(trace: &InventoryTrace) -> Result<f64, MetricsError> {
    if trace.demand.is_empty() || trace.demand.len() != trace.filled.len() {
        return Err(MetricsError::BadInput);
    }
    let unmet: f64 = trace
        .demand
        .iter()
        .zip(&trace.filled)
        .map(|(d, f)| (d - f).max(0.0))
        .sum();
    Ok(unmet / trace.demand.len() as f64)
}

/// Gross margin return on investment: total gross margin over mean
/// inventory value at cost.
pub fn gmroi(trace: &InventoryTrace) -> Result<f64, MetricsError> {
    if trace.filled.is_empty()
        || trace.filled.len() != trace.prices.len()
        || trace.filled.len() != trace.end_on_hand.len()
    {
        return Err(MetricsError::BadInput);
    }
    let margin: f64 = trace
        .filled
        .iter()
        .zip(&trace.prices)
        .map(|(f, p)| f * (p - trace.unit_cost))
        .sum();
    let mean_inventory_cost = trace.end_on_hand.iter().sum::<f64>()
        / trace.end_on_hand.len() as f64
        * trace.unit_cost;
    if mean_inventory_cost <= 0.0 {
        return Err(MetricsError::DegenerateSeries);
    }
    Ok(margin / mean_inventory_cost)
}

/// One-sided Wilcoxon signed-rank test of paired samples, alternative
/// `median(xs − ys) > 0`. Normal approximation with tie correction;
/// zero differences are dropped.
pub fn wilcoxon_signed_rank_greater(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(MetricsError::BadInput);
    }
    let mut diffs: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n < 5 {
        return Err(MetricsError::TooFew(5));
    }
    diffs.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    // Average ranks over ties on |d|.
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && (diffs[j + 1].abs() - diffs[i].abs()).abs() < 1e-12 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for r in ranks.iter_mut().take(j + 1).skip(i) {
            *r = avg_rank;
        }
        i = j + 1;
    }
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
    let z = (w_plus - mean - 0.5) / var.sqrt();
    Ok(1.0 - std_normal().cdf(z))
}
