//! Episodic agents over tiny finite problems.
//!
//! The control protocol per episode: commit to one hypothesis via a
//! Thompson draw at the boundary, act for the whole episode under that
//! hypothesis (replanning each step with a possibly depth-limited
//! lookahead), and keep filtering observations into the belief as they
//! arrive. The Thompson draw goes through a caller-supplied uniform so a
//! harness can couple the agent's draw to the environment's.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tiny::{exact_mdp_optimal, MdpSolution, TinyBamdp};
use crate::belief::{Belief, LatentParam, ParticleFilterConfig};

/// Algorithm interface the regret harness drives.
pub trait EpisodicAgent {
    /// Fresh episode: reset the belief to the prior representation.
    fn begin_episode(&mut self, episode_seed: u64);

    /// Thompson step through a shared coupling uniform; returns the
    /// hypothesis id the agent commits to for the episode.
    fn sample_theta(&mut self, coupling_u: f64) -> usize;

    fn act(&mut self, t: usize, state: usize, rng: &mut ChaCha8Rng) -> usize;

    /// Feed the realized transition into the filter.
    fn observe(&mut self, state: usize, action: usize, next_state: usize);

    /// Belief mass aggregated by hypothesis id, for filter-error
    /// instrumentation. `None` when the agent carries no belief.
    fn belief_mass(&self) -> Option<Vec<f64>>;

    /// Gap between the full-depth optimal action value and the chosen
    /// action's value under the agent's committed hypothesis. `None` for
    /// agents without planning instrumentation.
    fn q_gap(&self, t: usize, state: usize, action: usize) -> Option<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    /// Exact discrete posterior over the hypothesis set.
    Exact,
    /// Bootstrap particle cloud drawn from the prior each episode.
    Particle { n_particles: usize, resample_threshold: f64 },
}

/// Thompson agent with exact per-hypothesis planning, optionally depth
/// limited. The full-horizon value tables double as the planning backend
/// for every lookahead depth.
pub struct OracleAgent {
    problem: TinyBamdp,
    filter: FilterKind,
    /// Planning depth cap; `None` plans to the remaining horizon.
    depth_limit: Option<usize>,
    solutions: Vec<MdpSolution>,
    belief: Belief,
    committed: usize,
    episode_seed: u64,
    steps_seen: u64,
}

impl OracleAgent {
    pub fn new(problem: TinyBamdp, filter: FilterKind, depth_limit: Option<usize>) -> Self {
        let solutions = (0..problem.n_thetas())
            .map(|k| exact_mdp_optimal(&problem, k))
            .collect();
        let belief = problem.prior_belief();
        Self {
            problem,
            filter,
            depth_limit,
            solutions,
            belief,
            committed: 0,
            episode_seed: 0,
            steps_seen: 0,
        }
    }

    /// Exact filter, full-depth planning (the idealized configuration).
    pub fn exact_full(problem: TinyBamdp) -> Self {
        Self::new(problem, FilterKind::Exact, None)
    }

    fn prior_particles(&self, seed: u64) -> Belief {
        let FilterKind::Particle { n_particles, .. } = self.filter else {
            unreachable!("only called for particle filters")
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let thetas = self.problem.thetas();
        let prior = &self.problem.prior;
        let hypotheses: Vec<LatentParam> = (0..n_particles)
            .map(|_| {
                let u: f64 = rng.gen_range(0.0..1.0);
                let mut cumulative = 0.0;
                let mut chosen = thetas.len() - 1;
                for (i, &p) in prior.iter().enumerate() {
                    cumulative += p;
                    if u < cumulative {
                        chosen = i;
                        break;
                    }
                }
                thetas[chosen].clone()
            })
            .collect();
        Belief::uniform(hypotheses).expect("n_particles >= 1")
    }

    fn planning_depth(&self, t: usize) -> usize {
        let remaining = self.problem.horizon - t;
        match self.depth_limit {
            Some(limit) => limit.min(remaining),
            None => remaining,
        }
        .max(1)
    }
}

impl EpisodicAgent for OracleAgent {
    fn begin_episode(&mut self, episode_seed: u64) {
        self.episode_seed = episode_seed;
        self.steps_seen = 0;
        self.belief = match self.filter {
            FilterKind::Exact => self.problem.prior_belief(),
            FilterKind::Particle { .. } => self.prior_particles(episode_seed),
        };
    }

    fn sample_theta(&mut self, coupling_u: f64) -> usize {
        let mass = self.belief.mass_by_id(self.problem.n_thetas());
        let mut cumulative = 0.0;
        let mut chosen = mass.len() - 1;
        for (i, &m) in mass.iter().enumerate() {
            cumulative += m;
            if coupling_u < cumulative {
                chosen = i;
                break;
            }
        }
        self.committed = chosen;
        chosen
    }

    fn act(&mut self, t: usize, state: usize, _rng: &mut ChaCha8Rng) -> usize {
        let depth = self.planning_depth(t);
        let solution = &self.solutions[self.committed];
        let mut best = 0;
        let mut best_q = f64::NEG_INFINITY;
        for a in 0..self.problem.actions {
            let q = solution.q(&self.problem, self.committed, depth, state, a);
            if q > best_q {
                best_q = q;
                best = a;
            }
        }
        best
    }

    fn observe(&mut self, state: usize, action: usize, next_state: usize) {
        self.steps_seen += 1;
        let likelihoods: Vec<f64> = self
            .belief
            .hypotheses()
            .iter()
            .map(|h| self.problem.transitions[h.id][state][action][next_state])
            .collect();
        // An impossible observation under every particle would poison the
        // cloud; fall back to the episode-start prior in that case.
        match self.belief.bayes_update(&likelihoods) {
            Ok(updated) => {
                self.belief = match self.filter {
                    FilterKind::Exact => updated,
                    FilterKind::Particle { n_particles, resample_threshold } => {
                        let cfg = ParticleFilterConfig {
                            n_particles,
                            resample_threshold,
                            rng_seed: self.episode_seed
                                .wrapping_add(self.steps_seen.wrapping_mul(0x9E37_79B9)),
                        };
                        updated.maybe_resample(&cfg)
                    }
                };
            }
            Err(_) => {
                self.begin_episode(self.episode_seed);
            }
        }
    }

    fn belief_mass(&self) -> Option<Vec<f64>> {
        Some(self.belief.mass_by_id(self.problem.n_thetas()))
    }

    fn q_gap(&self, t: usize, state: usize, action: usize) -> Option<f64> {
        let remaining = self.problem.horizon - t;
        let solution = &self.solutions[self.committed];
        let best = (0..self.problem.actions)
            .map(|a| solution.q(&self.problem, self.committed, remaining, state, a))
            .fold(f64::NEG_INFINITY, f64::max);
        let chosen = solution.q(&self.problem, self.committed, remaining, state, action);
        Some(best - chosen)
    }
}

/// Uniform-random baseline.
pub struct RandomAgent {
    n_actions: usize,
}

impl RandomAgent {
    pub fn new(n_actions: usize) -> Self {
        Self { n_actions }
    }
}

impl EpisodicAgent for RandomAgent {
    fn begin_episode(&mut self, _episode_seed: u64) {}

    fn sample_theta(&mut self, _coupling_u: f64) -> usize {
        0
    }

    fn act(&mut self, _t: usize, _state: usize, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(0..self.n_actions)
    }

    fn observe(&mut self, _state: usize, _action: usize, _next_state: usize) {}

    fn belief_mass(&self) -> Option<Vec<f64>> {
        None
    }

    fn q_gap(&self, _t: usize, _state: usize, _action: usize) -> Option<f64> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::instances;

    #[test]
    fn exact_agent_commits_to_the_coupled_hypothesis() {
        let mut agent = OracleAgent::exact_full(instances::mirror_chain());
        agent.begin_episode(1);
        assert_eq!(agent.sample_theta(0.2), 0);
        assert_eq!(agent.sample_theta(0.7), 1);
    }

    #[test]
    fn full_depth_act_is_optimal_for_the_commitment() {
        let p = instances::mirror_chain();
        let mut agent = OracleAgent::exact_full(p);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        agent.begin_episode(1);
        agent.sample_theta(0.2); // theta 0: action 0 reaches the +1 state
        assert_eq!(agent.act(0, 0, &mut rng), 0);
        assert_eq!(agent.q_gap(0, 0, 0), Some(0.0));
        let gap_wrong = agent.q_gap(0, 0, 1).unwrap();
        assert!(gap_wrong > 0.5, "gap {gap_wrong}");
    }

    #[test]
    fn depth_one_agent_falls_into_the_greedy_trap() {
        let p = instances::greedy_trap();
        let mut agent = OracleAgent::new(p, FilterKind::Exact, Some(1));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        agent.begin_episode(1);
        agent.sample_theta(0.2); // theta 0: deferred path is open
        // Myopic value of looping (0.3) beats the deferred move (0.0).
        assert_eq!(agent.act(0, 0, &mut rng), 0);
        assert!(agent.q_gap(0, 0, 0).unwrap() > 0.0);
    }

    #[test]
    fn exact_filter_concentrates_on_the_truth() {
        let p = instances::mirror_chain();
        let mut agent = OracleAgent::exact_full(p);
        agent.begin_episode(1);
        agent.sample_theta(0.2);
        // Under theta 0, action 0 lands in state 1.
        agent.observe(0, 0, 1);
        let mass = agent.belief_mass().unwrap();
        assert!((mass[0] - 1.0).abs() < 1e-12, "mass {mass:?}");
    }

    #[test]
    fn particle_cloud_approximates_the_prior() {
        let p = instances::three_regimes();
        let mut agent = OracleAgent::new(
            p.clone(),
            FilterKind::Particle { n_particles: 4096, resample_threshold: 0.5 },
            None,
        );
        agent.begin_episode(3);
        let mass = agent.belief_mass().unwrap();
        for (m, &target) in mass.iter().zip(&p.prior) {
            assert!((m - target).abs() < 0.05, "mass {mass:?} vs prior {:?}", p.prior);
        }
    }

    #[test]
    fn impossible_observation_resets_the_particle_cloud() {
        let p = instances::mirror_chain();
        let mut agent = OracleAgent::new(
            p,
            FilterKind::Particle { n_particles: 8, resample_threshold: 0.5 },
            None,
        );
        agent.begin_episode(5);
        // Staying in state 0 is impossible under both hypotheses.
        agent.observe(0, 0, 0);
        let mass = agent.belief_mass().unwrap();
        assert!((mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
