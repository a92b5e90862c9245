//! Risk functionals over sampled returns: empirical lower-tail CVaR, the
//! blended mean/CVaR objective controlled by the risk weight, and the
//! chance-constraint predicate over sampled observation paths.
//!
//! Returns follow the larger-is-better convention, so CVaR averages the
//! worst (lowest) α-fraction of outcomes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("return distribution needs at least one sample")]
    EmptySamples,
    #[error("sample {0} is not finite")]
    NonFiniteSample(f64),
    #[error("alpha must lie in (0,1), got {0}")]
    BadAlpha(f64),
    #[error("eta must lie in [0,1], got {0}")]
    BadEta(f64),
    #[error("delta must lie in (0,1), got {0}")]
    BadDelta(f64),
    #[error("safe set bounds have mismatched dimensions")]
    BadSafeSet,
}

/// Empirical distribution of H-step discounted returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnDistribution {
    samples: Vec<f64>,
}

impl ReturnDistribution {
    pub fn new(samples: Vec<f64>) -> Result<Self, RiskError> {
        if samples.is_empty() {
            return Err(RiskError::EmptySamples);
        }
        if let Some(&bad) = samples.iter().find(|s| !s.is_finite()) {
            return Err(RiskError::NonFiniteSample(bad));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Axis-aligned box in observation space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeSet {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SafeSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, RiskError> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(RiskError::BadSafeSet);
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lower.len()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&xi, (&lo, &hi))| xi >= lo && xi <= hi)
    }
}

/// Risk knobs: CVaR level α, risk weight η, chance tolerance δ, and an
/// optional safe set (absent = chance-constraint layer inactive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskConfig {
    pub alpha: f64,
    pub eta: f64,
    pub delta: f64,
    pub safe_set: Option<SafeSet>,
}

impl RiskConfig {
    pub fn new(alpha: f64, eta: f64, delta: f64, safe_set: Option<SafeSet>) -> Result<Self, RiskError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(RiskError::BadAlpha(alpha));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(RiskError::BadEta(eta));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(RiskError::BadDelta(delta));
        }
        Ok(Self { alpha, eta, delta, safe_set })
    }
}

/// Empirical CVaR at level α: sort ascending and average the lowest
/// `k = ⌈α·M⌉` samples (at least one).
pub fn cvar(z: &ReturnDistribution, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    let mut sorted = z.samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ((alpha * sorted.len() as f64).ceil() as usize).max(1);
    sorted[..k].iter().sum::<f64>() / k as f64
}

/// `(1−η)·mean + η·CVaR_α`. At η=0 this is the plain expectation; at η=1
/// the pure tail objective.
pub fn blended_objective(z: &ReturnDistribution, cfg: &RiskConfig) -> f64 {
    (1.0 - cfg.eta) * z.mean() + cfg.eta * cvar(z, cfg.alpha)
}

/// Per-horizon chance-constraint check over sampled observation paths.
///
/// `paths[sample][horizon]` is the observation vector at that horizon step.
/// Step `h` passes when the fraction of samples inside the safe set is at
/// least `1 − δ`. Callers should not invoke this when the safe set is
/// inactive; the constraint layer is simply skipped in that case.
pub fn chance_constraint_ok(paths: &[Vec<Vec<f64>>], cfg: &RiskConfig) -> Vec<bool> {
    let safe = cfg
        .safe_set
        .as_ref()
        .expect("chance constraint requires an active safe set");
    assert!(!paths.is_empty(), "need at least one sampled path");
    let horizon = paths[0].len();
    let n = paths.len() as f64;
    (0..horizon)
        .map(|h| {
            let inside = paths.iter().filter(|path| safe.contains(&path[h])).count();
            inside as f64 / n >= 1.0 - cfg.delta
        })
        .collect()
}
