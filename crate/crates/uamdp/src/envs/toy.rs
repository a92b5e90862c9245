//! Two-step deferred-reward toy: a greedy trap used to validate lookahead.
//! Action 0 pays 1 now and nothing after; action 1 pays nothing now and 2
//! after. Gaussian reward noise makes search budget matter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::belief::LatentParam;
use crate::planner::{SimStep, SimulationModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyState {
    Start,
    AfterGreedy,
    AfterDeferred,
    Done,
}

pub struct TwoStepToy {
    pub noise_sd: f64,
}

impl TwoStepToy {
    pub fn noiseless() -> Self {
        Self { noise_sd: 0.0 }
    }

    /// Exact expected root value of each action under γ=1 (the enumeration
    /// oracle for this tree: greedy = 1, deferred = 2).
    pub fn exact_root_values() -> [f64; 2] {
        [1.0, 2.0]
    }

    fn noisy(&self, base: f64, rng: &mut ChaCha8Rng) -> f64 {
        if self.noise_sd == 0.0 {
            base
        } else {
            base + Normal::new(0.0, self.noise_sd).unwrap().sample(rng)
        }
    }
}

impl SimulationModel for TwoStepToy {
    type State = ToyState;

    fn num_actions(&self) -> usize {
        2
    }

    fn step(
        &self,
        state: &ToyState,
        action: usize,
        _theta: &LatentParam,
        rng: &mut ChaCha8Rng,
    ) -> SimStep<ToyState> {
        let (next, base, terminal) = match state {
            ToyState::Start => {
                if action == 0 {
                    (ToyState::AfterGreedy, 1.0, false)
                } else {
                    (ToyState::AfterDeferred, 0.0, false)
                }
            }
            ToyState::AfterGreedy => (ToyState::Done, 0.0, true),
            ToyState::AfterDeferred => (ToyState::Done, 2.0, true),
            ToyState::Done => (ToyState::Done, 0.0, true),
        };
        SimStep {
            next,
            reward: self.noisy(base, rng),
            terminal,
            observation: vec![],
        }
    }
}

/// Monte Carlo estimate of the toy's true root action values under a
/// uniform second-step policy, for cross-checking planner output. With
/// γ = 1 and symmetric noise this converges on [1, 2].
pub fn toy_mc_root_values(toy: &TwoStepToy, trials: usize, seed: u64) -> [f64; 2] {
    let theta = LatentParam::new(0, vec![]);
    let mut out = [0.0; 2];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut total = 0.0;
        for i in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((a as u64) << 32) ^ i as u64);
            let first = toy.step(&ToyState::Start, a, &theta, &mut rng);
            let second = toy.step(&first.next, 0, &theta, &mut rng);
            total += first.reward + second.reward;
        }
        *slot = total / trials as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{plan, PlannerConfig};

    fn cfg(budget: usize, seed: u64) -> PlannerConfig {
        PlannerConfig {
            depth_limit: 2,
            rollout_budget: budget,
            discount: 1.0,
            leaf_samples: 4,
            rng_seed: seed,
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_toy_is_solved_immediately() {
        let toy = TwoStepToy::noiseless();
        let theta = LatentParam::new(0, vec![]);
        let (a, d) = plan(&ToyState::Start, &theta, &toy, &cfg(16, 0), None).unwrap();
        assert_eq!(a, 1);
        let values = TwoStepToy::exact_root_values();
        assert!((d.root_values[0].unwrap() - values[0]).abs() < 1e-9);
        assert!((d.root_values[1].unwrap() - values[1]).abs() < 1e-9);
    }

    #[test]
    fn noisy_toy_success_rate_grows_with_budget() {
        let toy = TwoStepToy { noise_sd: 1.5 };
        let theta = LatentParam::new(0, vec![]);
        let trials = 200;
        let mut success = Vec::new();
        for budget in [8usize, 32, 128] {
            let hits = (0..trials)
                .filter(|&s| {
                    plan(&ToyState::Start, &theta, &toy, &cfg(budget, s as u64), None)
                        .unwrap()
                        .0
                        == 1
                })
                .count();
            success.push(hits as f64 / trials as f64);
        }
        // Allow 2 points of estimation noise on the monotone trend.
        assert!(success[0] <= success[1] + 0.02, "rates {success:?}");
        assert!(success[1] <= success[2] + 0.02, "rates {success:?}");
        assert!(success[2] >= 0.95, "rates {success:?}");
    }

    #[test]
    fn q_estimate_matches_the_exhaustive_expectation() {
        use crate::planner::q_estimate;
        let toy = TwoStepToy { noise_sd: 1.5 };
        let theta = LatentParam::new(0, vec![]);
        let cfg = PlannerConfig {
            depth_limit: 2,
            rollout_budget: 10_000,
            discount: 1.0,
            leaf_samples: 1,
            rng_seed: 3,
            ..Default::default()
        };
        // Exhaustive expectations under the uniform rollout policy after
        // the first action: both second-step choices pay the same, so
        // Q(start, greedy) = 1 and Q(start, deferred) = 2.
        let se = 1.5 * std::f64::consts::SQRT_2 / (cfg.rollout_budget as f64).sqrt();
        for (action, expected) in [(0usize, 1.0), (1usize, 2.0)] {
            let q = q_estimate(&ToyState::Start, action, &theta, &toy, &cfg);
            assert!(
                (q - expected).abs() < 3.0 * se,
                "action {action}: q {q} vs expected {expected} (3se {})",
                3.0 * se
            );
        }
    }

    #[test]
    fn mc_oracle_agrees_with_enumeration() {
        let toy = TwoStepToy { noise_sd: 1.5 };
        let vals = toy_mc_root_values(&toy, 20_000, 7);
        let se = 1.5 * std::f64::consts::SQRT_2 / (20_000f64).sqrt();
        assert!((vals[0] - 1.0).abs() < 3.0 * se, "{vals:?}");
        assert!((vals[1] - 2.0).abs() < 3.0 * se, "{vals:?}");
    }
}
