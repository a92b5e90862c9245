//! Episodic regret measurement against per-hypothesis optimal values, with
//! filter- and planner-error instrumentation feeding the additive error
//! bound.
//!
//! Per episode the harness draws one uniform, maps it through the prior's
//! inverse CDF to pick the environment hypothesis, and hands the same
//! uniform to the agent's Thompson step. With an exact filter the two
//! draws coincide and the agent plays the optimal policy for the very MDP
//! it faces, so regret is zero in expectation; approximation error in the
//! belief shows up as draw mismatches, which is exactly how filter quality
//! degrades regret.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agents::EpisodicAgent;
use super::tiny::{exact_mdp_optimal, TinyBamdp};

/// Error-budget scalars for the additive bound: worst single-step filter
/// L1 error, worst planner action-value gap, and the reward bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub eps_f: f64,
    pub eps_p: f64,
    pub r_max: f64,
}

/// The additive value-gap bound `ε_p/(1−γ) + 2γ·R_max·ε_f/(1−γ)²`.
pub fn error_bound(budget: &ErrorBudget, gamma: f64) -> f64 {
    assert!(gamma > 0.0 && gamma < 1.0);
    budget.eps_p / (1.0 - gamma)
        + 2.0 * gamma * budget.r_max * budget.eps_f / (1.0 - gamma).powi(2)
}

/// True iff the measured value gap respects the additive bound.
pub fn error_bound_check(budget: &ErrorBudget, measured_gap: f64, gamma: f64) -> bool {
    measured_gap <= error_bound(budget, gamma)
}

/// Aggregate over one regret run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretReport {
    pub episodes: usize,
    /// Mean of `V*_{M(θ_k)}(s0) − G_k`.
    pub mean_regret: f64,
    pub std_error: f64,
    pub mean_return: f64,
    pub mean_optimal: f64,
    /// Measured planner budget: worst action-value gap of any chosen action
    /// against the full-depth optimum under the committed hypothesis.
    pub max_q_gap: f64,
    /// Measured filter budget: worst single-step L1 distance between the
    /// agent's belief and the exact posterior, including the episode-start
    /// representation of the prior.
    pub max_filter_l1: f64,
    /// Median of the same per-step distances (robust trend statistic).
    pub median_filter_l1: f64,
    /// Mean of the per-step distances; stays informative when exact
    /// observations collapse most posteriors to a point.
    pub mean_filter_l1: f64,
}

impl RegretReport {
    pub fn ci95(&self) -> (f64, f64) {
        let half = 1.96 * self.std_error;
        (self.mean_regret - half, self.mean_regret + half)
    }

    pub fn ci_contains_zero(&self) -> bool {
        let (lo, hi) = self.ci95();
        // The slack absorbs float-summation noise when returns are
        // deterministic and the interval degenerates to a point.
        lo <= 1e-9 && hi >= -1e-9
    }

    pub fn ci_excludes_zero(&self) -> bool {
        !self.ci_contains_zero()
    }

    /// Measured error budget with the instance's reward bound.
    pub fn budget(&self, r_max: f64) -> ErrorBudget {
        ErrorBudget { eps_f: self.max_filter_l1, eps_p: self.max_q_gap, r_max }
    }
}

fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cumulative += w;
        if u < cumulative {
            return i;
        }
    }
    weights.len() - 1
}

fn mix_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)).rotate_left(23)
}

/// Runs `n_episodes` independent episodes and reports mean regret with
/// instrumentation. Each episode redraws the environment hypothesis from
/// the prior; the agent restarts from the prior as well.
pub fn bayes_regret(
    problem: &TinyBamdp,
    agent: &mut dyn EpisodicAgent,
    n_episodes: usize,
    rng_seed: u64,
) -> RegretReport {
    let solutions: Vec<_> = (0..problem.n_thetas())
        .map(|k| exact_mdp_optimal(problem, k))
        .collect();

    let mut regrets = Vec::with_capacity(n_episodes);
    let mut returns = Vec::with_capacity(n_episodes);
    let mut optimals = Vec::with_capacity(n_episodes);
    let mut max_q_gap = 0.0f64;
    let mut filter_l1 = Vec::new();

    for k in 0..n_episodes {
        let ep_seed = mix_seed(rng_seed, k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(ep_seed);
        let coupling_u: f64 = rng.gen_range(0.0..1.0);
        let theta_env = inverse_cdf(&problem.prior, coupling_u);

        agent.begin_episode(ep_seed ^ 0xA5A5_5A5A_DEAD_BEEF);
        let mut exact_posterior = problem.prior.clone();
        // The episode-start belief is itself a filter output (the agent's
        // representation of the prior); its error is what skews the draw.
        if let Some(mass) = agent.belief_mass() {
            let l1: f64 = mass
                .iter()
                .zip(&exact_posterior)
                .map(|(m, e)| (m - e).abs())
                .sum();
            filter_l1.push(l1);
        }
        agent.sample_theta(coupling_u);
        let mut state = problem.initial_state;
        let mut episode_return = 0.0;
        let mut disc = 1.0;
        for t in 0..problem.horizon {
            let action = agent.act(t, state, &mut rng);
            if let Some(gap) = agent.q_gap(t, state, action) {
                max_q_gap = max_q_gap.max(gap);
            }
            episode_return += disc * problem.rewards[state][action];
            disc *= problem.discount;

            let u: f64 = rng.gen_range(0.0..1.0);
            let next_state = inverse_cdf(&problem.transitions[theta_env][state][action], u);

            agent.observe(state, action, next_state);
            let normalizer: f64 = exact_posterior
                .iter()
                .enumerate()
                .map(|(h, b)| b * problem.transitions[h][state][action][next_state])
                .sum();
            if normalizer > 0.0 {
                for (h, b) in exact_posterior.iter_mut().enumerate() {
                    *b *= problem.transitions[h][state][action][next_state] / normalizer;
                }
            }
            if let Some(mass) = agent.belief_mass() {
                let l1: f64 = mass
                    .iter()
                    .zip(&exact_posterior)
                    .map(|(m, e)| (m - e).abs())
                    .sum();
                filter_l1.push(l1);
            }
            state = next_state;
        }

        let optimal = solutions[theta_env].values[problem.horizon][problem.initial_state];
        regrets.push(optimal - episode_return);
        returns.push(episode_return);
        optimals.push(optimal);
    }

    let n = n_episodes as f64;
    let mean_regret = regrets.iter().sum::<f64>() / n;
    let var = regrets.iter().map(|r| (r - mean_regret).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let std_error = (var / n).sqrt();

    let (max_filter_l1, median_filter_l1, mean_filter_l1) = if filter_l1.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        let mut sorted = filter_l1.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (
            sorted[sorted.len() - 1],
            sorted[sorted.len() / 2],
            sorted.iter().sum::<f64>() / sorted.len() as f64,
        )
    };

    RegretReport {
        episodes: n_episodes,
        mean_regret,
        std_error,
        mean_return: returns.iter().sum::<f64>() / n,
        mean_optimal: optimals.iter().sum::<f64>() / n,
        max_q_gap,
        max_filter_l1,
        median_filter_l1,
        mean_filter_l1,
    }
}
