//! Predictive distributions over the next observation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Variance floor applied wherever a sample variance can collapse to zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("distribution needs at least one output dimension")]
    EmptyDimensions,
    #[error("means and variances differ in length ({means} vs {variances})")]
    DimensionMismatch { means: usize, variances: usize },
    #[error("variance {0} must be strictly positive and finite")]
    NonPositiveVariance(f64),
    #[error("empirical distribution needs at least one sample row")]
    NoSamples,
    #[error("sample rows have inconsistent dimension")]
    RaggedSamples,
    #[error("observation has dimension {got}, distribution has {expected}")]
    ObservationDimension { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    DiagonalGaussian,
    Empirical,
}

/// Per-dimension predictive distribution: either an independent Gaussian per
/// output, or an empirical bag of sampled draws (e.g. from an ensemble).
///
/// Serializes as `{kind, means, variances}`; sample rows are an in-memory
/// detail and are not exported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveDist {
    pub kind: DistKind,
    means: Vec<f64>,
    variances: Vec<f64>,
    #[serde(skip)]
    samples: Option<Vec<Vec<f64>>>,
}

impl PredictiveDist {
    pub fn diagonal_gaussian(means: Vec<f64>, variances: Vec<f64>) -> Result<Self, DistError> {
        if means.is_empty() {
            return Err(DistError::EmptyDimensions);
        }
        if means.len() != variances.len() {
            return Err(DistError::DimensionMismatch {
                means: means.len(),
                variances: variances.len(),
            });
        }
        for &v in &variances {
            if !v.is_finite() || v <= 0.0 {
                return Err(DistError::NonPositiveVariance(v));
            }
        }
        Ok(Self {
            kind: DistKind::DiagonalGaussian,
            means,
            variances,
            samples: None,
        })
    }

    /// Convenience constructor for a univariate Gaussian.
    pub fn scalar_gaussian(mean: f64, variance: f64) -> Result<Self, DistError> {
        Self::diagonal_gaussian(vec![mean], vec![variance])
    }

    /// Builds an empirical distribution from sample rows; means and variances
    /// are moment-matched (variance floored so downstream intervals stay valid).
    pub fn empirical(samples: Vec<Vec<f64>>) -> Result<Self, DistError> {
        if samples.is_empty() {
            return Err(DistError::NoSamples);
        }
        let d = samples[0].len();
        if d == 0 {
            return Err(DistError::EmptyDimensions);
        }
        if samples.iter().any(|row| row.len() != d) {
            return Err(DistError::RaggedSamples);
        }
        let m = samples.len() as f64;
        let mut means = vec![0.0; d];
        for row in &samples {
            for (mean, &x) in means.iter_mut().zip(row) {
                *mean += x / m;
            }
        }
        let mut variances = vec![0.0; d];
        if samples.len() > 1 {
            for row in &samples {
                for ((var, &mean), &x) in variances.iter_mut().zip(&means).zip(row) {
                    *var += (x - mean).powi(2) / (m - 1.0);
                }
            }
        }
        for v in &mut variances {
            *v = v.max(VARIANCE_FLOOR);
        }
        Ok(Self {
            kind: DistKind::Empirical,
            means,
            variances,
            samples: Some(samples),
        })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn samples(&self) -> Option<&[Vec<f64>]> {
        self.samples.as_deref()
    }

    /// Log density of an observation under the predictive.
    ///
    /// Diagonal-Gaussian kind sums per-dimension Gaussian log densities.
    /// Empirical kind evaluates a Gaussian KDE over the stored rows with
    /// Silverman's bandwidth per dimension.
    pub fn log_likelihood(&self, x: &[f64]) -> Result<f64, DistError> {
        if x.len() != self.dim() {
            return Err(DistError::ObservationDimension {
                got: x.len(),
                expected: self.dim(),
            });
        }
        match self.kind {
            DistKind::DiagonalGaussian => Ok(self
                .means
                .iter()
                .zip(&self.variances)
                .zip(x)
                .map(|((&mu, &var), &xi)| gaussian_log_density(xi, mu, var))
                .sum()),
            DistKind::Empirical => {
                let samples = self.samples.as_ref().expect("empirical kind stores samples");
                let bandwidths = silverman_bandwidths(samples);
                // log( (1/M) Σ_m Π_j N(x_j; s_mj, h_j²) ) via log-sum-exp.
                let log_terms: Vec<f64> = samples
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&bandwidths)
                            .zip(x)
                            .map(|((&s, &h), &xi)| gaussian_log_density(xi, s, h * h))
                            .sum::<f64>()
                    })
                    .collect();
                let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = log_terms.iter().map(|&t| (t - max).exp()).sum();
                Ok(max + (sum / samples.len() as f64).ln())
            }
        }
    }

    /// One draw from the predictive, deterministic given the seed.
    ///
    /// Empirical kind returns one stored row chosen uniformly.
    pub fn sample_next(&self, rng_seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        self.sample_with(&mut rng)
    }

    /// Same draw on a caller-owned RNG stream.
    pub fn sample_with(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self.kind {
            DistKind::DiagonalGaussian => self
                .means
                .iter()
                .zip(&self.variances)
                .map(|(&mu, &var)| {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    mu + var.sqrt() * z
                })
                .collect(),
            DistKind::Empirical => {
                let samples = self.samples.as_ref().expect("empirical kind stores samples");
                let idx = rng.gen_range(0..samples.len());
                samples[idx].clone()
            }
        }
    }
}

pub(crate) fn gaussian_log_density(x: f64, mean: f64, variance: f64) -> f64 {
    let var = variance.max(VARIANCE_FLOOR);
    -0.5 * ((2.0 * PI * var).ln() + (x - mean).powi(2) / var)
}

/// Silverman's rule-of-thumb bandwidth per dimension:
/// `h = 0.9 · min(σ, IQR/1.34) · M^(−1/5)`, floored to stay usable when the
/// sample column is constant.
fn silverman_bandwidths(samples: &[Vec<f64>]) -> Vec<f64> {
    let m = samples.len();
    let d = samples[0].len();
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let mut col: Vec<f64> = samples.iter().map(|row| row[j]).collect();
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mean = col.iter().sum::<f64>() / m as f64;
        let sd = if m > 1 {
            (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0)).sqrt()
        } else {
            0.0
        };
        let iqr = quantile_sorted(&col, 0.75) - quantile_sorted(&col, 0.25);
        let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
        let h = 0.9 * spread * (m as f64).powf(-0.2);
        out.push(h.max(1e-6));
    }
    out
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}
