//! Conjugate scalar-Gaussian model: a Gaussian belief over a latent mean
//! return with known observation noise. This is the closed-form forecaster
//! behind the two-step walkthrough scenario, and the cheap likelihood model
//! for regime-hypothesis environments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dist::PredictiveDist;
use super::Forecaster;
use crate::belief::LatentParam;

/// Gaussian belief `N(mu, var)` over a latent mean, observed through
/// additive `N(0, noise_var)` noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarGaussianBelief {
    pub mu: f64,
    pub var: f64,
    pub noise_var: f64,
}

impl ScalarGaussianBelief {
    pub fn new(mu: f64, var: f64, noise_var: f64) -> Self {
        assert!(var > 0.0 && noise_var > 0.0, "variances must be positive");
        Self { mu, var, noise_var }
    }

    /// Exact conjugate posterior after observing `r_obs`:
    ///
    /// `mu' = mu + var/(var + noise_var) · (r_obs − mu)`
    /// `var' = var · noise_var / (var + noise_var)`
    pub fn conjugate_update(&self, r_obs: f64) -> Self {
        let gain = self.var / (self.var + self.noise_var);
        Self {
            mu: self.mu + gain * (r_obs - self.mu),
            var: self.var * self.noise_var / (self.var + self.noise_var),
            noise_var: self.noise_var,
        }
    }

    /// Predictive over the next observation: `N(mu, var + noise_var)`.
    pub fn predictive(&self) -> PredictiveDist {
        PredictiveDist::scalar_gaussian(self.mu, self.var + self.noise_var)
            .expect("positive variances")
    }

    /// Thompson draw of the latent mean from the current belief.
    pub fn thompson_draw(&self, rng_seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        self.mu + self.var.sqrt() * z
    }
}

/// Per-hypothesis Gaussian likelihood read straight off the hypothesis
/// parameters: observation `x ~ N(params[mean_idx], params[sd_idx]²)`.
///
/// This is the scalar-Gaussian model applied to a discrete hypothesis set,
/// e.g. market regimes carrying (drift, volatility).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeGaussianForecaster {
    pub mean_idx: usize,
    pub sd_idx: usize,
}

impl Default for RegimeGaussianForecaster {
    fn default() -> Self {
        Self { mean_idx: 0, sd_idx: 1 }
    }
}

impl Forecaster for RegimeGaussianForecaster {
    fn predict(&self, _features: &[f64], theta: &LatentParam) -> PredictiveDist {
        let mean = theta.params[self.mean_idx];
        let sd = theta.params[self.sd_idx];
        PredictiveDist::scalar_gaussian(mean, (sd * sd).max(1e-12)).expect("positive variance")
    }
}
