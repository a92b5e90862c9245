//! Posterior belief over latent environment parameters.
//!
//! A belief is a weighted list of hypotheses. The same representation serves
//! two roles: an exact discrete posterior over a finite hypothesis set (no
//! resampling, weights carry the full posterior) and an N-particle
//! approximation (hypotheses may repeat, resampling keeps the set healthy).
//!
//! Values are immutable after construction; every operation returns a new
//! `Belief`, so beliefs can be shared freely across planner branches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Weight-sum normalization tolerance enforced by constructors.
pub const WEIGHT_TOL: f64 = 1e-12;

/// One hypothesis about the latent environment parameters.
///
/// `params` semantics are fixed by the environment/forecaster pairing
/// (e.g. `[drift, volatility]` for a market regime). The `id` survives
/// copying and resampling, so particle multiplicities can be traced back
/// to the hypothesis they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentParam {
    pub id: usize,
    pub params: Vec<f64>,
}

impl LatentParam {
    pub fn new(id: usize, params: Vec<f64>) -> Self {
        Self { id, params }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BeliefError {
    #[error("belief must hold at least one hypothesis")]
    Empty,
    #[error("weights and hypotheses differ in length ({weights} vs {hypotheses})")]
    LengthMismatch { weights: usize, hypotheses: usize },
    #[error("weight {0} is negative or non-finite")]
    InvalidWeight(f64),
    #[error("weights sum to {0}, cannot normalize")]
    DegenerateWeights(f64),
    #[error("likelihood vector length {got}, expected {expected}")]
    LikelihoodLength { got: usize, expected: usize },
    #[error("likelihood {0} is negative or non-finite")]
    InvalidLikelihood(f64),
    #[error("every posterior weight is zero; the observation is impossible under all hypotheses")]
    AllZeroLikelihood,
}

/// Configuration for the particle-filter view of a belief.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParticleFilterConfig {
    /// Number of particles kept after resampling.
    pub n_particles: usize,
    /// Resample when effective sample size falls below this fraction of N.
    pub resample_threshold: f64,
    pub rng_seed: u64,
}

impl Default for ParticleFilterConfig {
    fn default() -> Self {
        Self {
            n_particles: 256,
            resample_threshold: 0.5,
            rng_seed: 0,
        }
    }
}

/// Normalized posterior over a finite set of latent-parameter hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    hypotheses: Vec<LatentParam>,
    weights: Vec<f64>,
}

impl Belief {
    /// Builds a belief from hypotheses and (not necessarily normalized)
    /// non-negative weights. Weights are renormalized to sum to one.
    pub fn new(hypotheses: Vec<LatentParam>, weights: Vec<f64>) -> Result<Self, BeliefError> {
        if hypotheses.is_empty() {
            return Err(BeliefError::Empty);
        }
        if hypotheses.len() != weights.len() {
            return Err(BeliefError::LengthMismatch {
                weights: weights.len(),
                hypotheses: hypotheses.len(),
            });
        }
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(BeliefError::InvalidWeight(w));
            }
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(BeliefError::DegenerateWeights(total));
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self { hypotheses, weights })
    }

    /// Uniform belief over the given hypotheses.
    pub fn uniform(hypotheses: Vec<LatentParam>) -> Result<Self, BeliefError> {
        let n = hypotheses.len();
        Self::new(hypotheses, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn hypotheses(&self) -> &[LatentParam] {
        &self.hypotheses
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest-weight hypothesis (lowest index wins ties).
    pub fn mode(&self) -> &LatentParam {
        let mut best = 0;
        for i in 1..self.weights.len() {
            if self.weights[i] > self.weights[best] {
                best = i;
            }
        }
        &self.hypotheses[best]
    }

    /// Total weight attributed to each hypothesis id, summed over particles.
    ///
    /// For an exact belief this is just the weight vector keyed by id; for a
    /// particle belief it aggregates duplicates, which is what filter-error
    /// instrumentation compares against the exact posterior.
    pub fn mass_by_id(&self, n_ids: usize) -> Vec<f64> {
        let mut mass = vec![0.0; n_ids];
        for (h, &w) in self.hypotheses.iter().zip(&self.weights) {
            if h.id < n_ids {
                mass[h.id] += w;
            }
        }
        mass
    }

    /// Posterior update: `w_i ∝ w_i · likelihood_i`, hypotheses unchanged.
    ///
    /// Computed in log space with a max shift so long runs of small
    /// likelihoods do not underflow to an all-zero posterior.
    pub fn bayes_update(&self, likelihoods: &[f64]) -> Result<Belief, BeliefError> {
        for &l in likelihoods {
            if !l.is_finite() || l < 0.0 {
                return Err(BeliefError::InvalidLikelihood(l));
            }
        }
        let log_liks: Vec<f64> = likelihoods.iter().map(|&l| l.ln()).collect();
        self.bayes_update_log(&log_liks)
    }

    /// Same update with log-likelihood inputs (`-inf` allowed for zero mass).
    pub fn bayes_update_log(&self, log_likelihoods: &[f64]) -> Result<Belief, BeliefError> {
        if log_likelihoods.len() != self.len() {
            return Err(BeliefError::LikelihoodLength {
                got: log_likelihoods.len(),
                expected: self.len(),
            });
        }
        let log_post: Vec<f64> = self
            .weights
            .iter()
            .zip(log_likelihoods)
            .map(|(&w, &ll)| {
                if w > 0.0 && ll > f64::NEG_INFINITY {
                    w.ln() + ll
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let max = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(BeliefError::AllZeroLikelihood);
        }
        let unnorm: Vec<f64> = log_post.iter().map(|&lp| (lp - max).exp()).collect();
        let total: f64 = unnorm.iter().sum();
        let weights = unnorm.iter().map(|u| u / total).collect();
        Ok(Belief {
            hypotheses: self.hypotheses.clone(),
            weights,
        })
    }

    /// Effective sample size `1 / Σ w_i²`, in `[1, len]`.
    pub fn effective_sample_size(&self) -> f64 {
        let sum_sq: f64 = self.weights.iter().map(|w| w * w).sum();
        1.0 / sum_sq
    }

    /// Systematic resampling to `cfg.n_particles` equally weighted particles.
    ///
    /// The expected multiplicity of hypothesis `i` is `n_particles · w_i`.
    pub fn resample(&self, cfg: &ParticleFilterConfig) -> Belief {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let offset: f64 = rng.gen_range(0.0..1.0);
        self.resample_with_offset(cfg.n_particles, offset)
    }

    /// Systematic resampling with an explicit stratum offset `u ∈ [0, 1)`.
    ///
    /// Particle `i` lands where the cumulative weight first exceeds
    /// `(i + u) / n`. Exposed so the strata can be pinned in tests.
    pub fn resample_with_offset(&self, n: usize, u: f64) -> Belief {
        assert!(n >= 1, "n_particles must be >= 1");
        assert!((0.0..1.0).contains(&u), "offset must lie in [0, 1)");
        let mut out = Vec::with_capacity(n);
        let mut cumulative = self.weights[0];
        let mut idx = 0;
        for i in 0..n {
            let position = (i as f64 + u) / n as f64;
            while position >= cumulative && idx + 1 < self.len() {
                idx += 1;
                cumulative += self.weights[idx];
            }
            out.push(self.hypotheses[idx].clone());
        }
        Belief {
            hypotheses: out,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Resamples only when `ESS / len < cfg.resample_threshold`.
    pub fn maybe_resample(&self, cfg: &ParticleFilterConfig) -> Belief {
        if self.effective_sample_size() / (self.len() as f64) < cfg.resample_threshold {
            self.resample(cfg)
        } else {
            self.clone()
        }
    }

    /// Thompson draw: hypothesis `i` with probability `w_i`, by inverse CDF
    /// on a single seeded uniform.
    pub fn thompson_sample(&self, rng_seed: u64) -> &LatentParam {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let u: f64 = rng.gen_range(0.0..1.0);
        self.sample_at(u)
    }

    /// Inverse-CDF lookup at `u ∈ [0, 1)`. Sharing one `u` across two
    /// beliefs couples their draws, which is how filter error is isolated
    /// in regret experiments.
    pub fn sample_at(&self, u: f64) -> &LatentParam {
        let mut cumulative = 0.0;
        for (h, &w) in self.hypotheses.iter().zip(&self.weights) {
            cumulative += w;
            if u < cumulative {
                return h;
            }
        }
        // Guards against cumulative rounding just below 1.
        self.hypotheses.last().expect("belief is non-empty")
    }

    /// Shannon entropy `−Σ w_i ln w_i` in nats, with `0·ln 0 := 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * w.ln())
            .sum::<f64>()
    }
}
