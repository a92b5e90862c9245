//! Feature-noise robustness sweep: corrupt a fraction of the (scaled)
//! feature columns with additive Gaussian noise each step and track how
//! mean reward degrades relative to the clean run on the same seeds.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ForecasterKind, RunConfig};
use super::run::{run_trading_seed_with_noise, FeatureNoise, RunError};
use crate::envs::trading_layout;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseLevelResult {
    pub noise_frac: f64,
    pub mean_reward: f64,
    /// Mean reward relative to the clean run (exactly 1 at fraction 0).
    pub ratio_vs_clean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub sigma: f64,
    pub levels: Vec<NoiseLevelResult>,
}

/// Runs the sweep on the GP-forecaster trading loop (the configuration
/// whose decisions actually consume features).
pub fn run_noise_robustness(
    cfg: &RunConfig,
    noise_fracs: &[f64],
    sigma: f64,
) -> Result<RobustnessReport, RunError> {
    let mut cfg = cfg.clone();
    cfg.forecaster = ForecasterKind::Gp;
    cfg.validate()?;

    let n_dims = trading_layout().len();
    let mut clean_mean = None;
    let mut levels = Vec::with_capacity(noise_fracs.len());
    for &frac in noise_fracs {
        let noise = if frac <= 0.0 {
            FeatureNoise::default()
        } else {
            // Deterministic "random subset": seeded shuffle of the columns.
            let mut dims: Vec<usize> = (0..n_dims).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(0xD1_C3 ^ (frac * 1e6) as u64);
            dims.shuffle(&mut rng);
            let keep = ((frac * n_dims as f64).ceil() as usize).clamp(1, n_dims);
            dims.truncate(keep);
            dims.sort_unstable();
            FeatureNoise { dims, sigma }
        };

        let mut total = 0.0;
        for &seed in &cfg.seeds {
            let run = run_trading_seed_with_noise(&cfg, seed, &noise)?;
            total += run.metric("mean_reward").expect("trading metric present");
        }
        let mean_reward = total / cfg.seeds.len() as f64;
        let clean = *clean_mean.get_or_insert(mean_reward);
        let ratio = if clean.abs() > 1e-12 { mean_reward / clean } else { f64::NAN };
        levels.push(NoiseLevelResult { noise_frac: frac, mean_reward, ratio_vs_clean: ratio });
    }
    Ok(RobustnessReport { sigma, levels })
}
