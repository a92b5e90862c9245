//! Desk-scale finite problems with latent dynamics: explicit per-hypothesis
//! transition tensors, a shared reward table, and a prior. Small enough to
//! solve exactly, which is what makes them useful as ground truth.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::belief::{Belief, LatentParam};

#[derive(Debug, Error)]
pub enum TinyError {
    #[error("transition row does not sum to 1 (theta {theta}, state {state}, action {action}: {sum})")]
    BadTransitionRow { theta: usize, state: usize, action: usize, sum: f64 },
    #[error("prior must have one weight per hypothesis and sum to 1")]
    BadPrior,
    #[error("tensor shape does not match states/actions/thetas")]
    BadShape,
    #[error("problem too large: |S|·|A|·|Θ| = {0} exceeds the desk-scale cap of 1000")]
    TooLarge(usize),
    #[error("discount must lie in (0,1)")]
    BadHorizon,
    #[error("initial state {0} out of range")]
    BadInitialState(usize),
    #[error("reachable belief tree exceeded the node cap {0}")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A finite MDP family indexed by a latent hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TinyBamdp {
    pub name: String,
    pub states: usize,
    pub actions: usize,
    /// `transitions[theta][s][a][s']`.
    pub transitions: Vec<Vec<Vec<Vec<f64>>>>,
    /// `rewards[s][a]`, shared across hypotheses.
    pub rewards: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub horizon: usize,
    pub discount: f64,
    pub initial_state: usize,
}

impl TinyBamdp {
    pub fn validate(&self) -> Result<(), TinyError> {
        let size = self.states * self.actions * self.transitions.len();
        if size > 1000 {
            return Err(TinyError::TooLarge(size));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(TinyError::BadHorizon);
        }
        if self.initial_state >= self.states {
            return Err(TinyError::BadInitialState(self.initial_state));
        }
        if self.rewards.len() != self.states
            || self.rewards.iter().any(|row| row.len() != self.actions)
        {
            return Err(TinyError::BadShape);
        }
        if self.prior.len() != self.transitions.len()
            || (self.prior.iter().sum::<f64>() - 1.0).abs() > 1e-9
            || self.prior.iter().any(|&p| p < 0.0)
        {
            return Err(TinyError::BadPrior);
        }
        for (k, tensor) in self.transitions.iter().enumerate() {
            if tensor.len() != self.states {
                return Err(TinyError::BadShape);
            }
            for (s, per_action) in tensor.iter().enumerate() {
                if per_action.len() != self.actions {
                    return Err(TinyError::BadShape);
                }
                for (a, row) in per_action.iter().enumerate() {
                    if row.len() != self.states {
                        return Err(TinyError::BadShape);
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > 1e-12 || row.iter().any(|&p| p < 0.0) {
                        return Err(TinyError::BadTransitionRow {
                            theta: k,
                            state: s,
                            action: a,
                            sum,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, TinyError> {
        let text = std::fs::read_to_string(path)?;
        let problem: TinyBamdp = serde_json::from_str(&text)?;
        problem.validate()?;
        Ok(problem)
    }

    pub fn n_thetas(&self) -> usize {
        self.transitions.len()
    }

    /// Hypotheses as latent parameters (id = index into the tensor).
    pub fn thetas(&self) -> Vec<LatentParam> {
        (0..self.n_thetas())
            .map(|i| LatentParam::new(i, vec![i as f64]))
            .collect()
    }

    pub fn prior_belief(&self) -> Belief {
        Belief::new(self.thetas(), self.prior.clone()).expect("validated prior")
    }

    /// Largest absolute reward, the `R_max` of the error bound.
    pub fn r_max(&self) -> f64 {
        self.rewards
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &r| acc.max(r.abs()))
    }
}

/// Finite-horizon optimal values and greedy policy for one hypothesis.
///
/// `values[d][s]` is the optimal d-step-to-go value; `policy[d][s]` the
/// greedy action with d steps to go (lowest index on ties). `values[0]` is
/// all zeros.
#[derive(Debug, Clone)]
pub struct MdpSolution {
    pub values: Vec<Vec<f64>>,
    pub policy: Vec<Vec<usize>>,
}

impl MdpSolution {
    /// Optimal action value with `depth` steps to go.
    pub fn q(&self, problem: &TinyBamdp, theta: usize, depth: usize, s: usize, a: usize) -> f64 {
        let future: f64 = if depth > 1 {
            problem.transitions[theta][s][a]
                .iter()
                .zip(&self.values[depth - 1])
                .map(|(p, v)| p * v)
                .sum()
        } else {
            0.0
        };
        problem.rewards[s][a] + problem.discount * future
    }
}

/// Exact finite-horizon value iteration on `M(theta)` up to the episode
/// horizon.
pub fn exact_mdp_optimal(problem: &TinyBamdp, theta: usize) -> MdpSolution {
    let h = problem.horizon;
    let mut values = vec![vec![0.0; problem.states]; h + 1];
    let mut policy = vec![vec![0usize; problem.states]; h + 1];
    let mut solution = MdpSolution { values: values.clone(), policy: policy.clone() };
    for depth in 1..=h {
        for s in 0..problem.states {
            let mut best_a = 0;
            let mut best_q = f64::NEG_INFINITY;
            for a in 0..problem.actions {
                let q = solution.q(problem, theta, depth, s, a);
                if q > best_q {
                    best_q = q;
                    best_a = a;
                }
            }
            values[depth][s] = best_q;
            policy[depth][s] = best_a;
        }
        solution.values[depth] = values[depth].clone();
        solution.policy[depth] = policy[depth].clone();
    }
    solution
}

/// Value of a fixed (possibly non-adaptive) Markov policy `pi[d][s]` under
/// one hypothesis, by backward induction.
pub fn mdp_policy_value(problem: &TinyBamdp, theta: usize, policy: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let h = problem.horizon;
    let mut values = vec![vec![0.0; problem.states]; h + 1];
    for depth in 1..=h {
        for s in 0..problem.states {
            let a = policy[depth][s];
            let future: f64 = problem.transitions[theta][s][a]
                .iter()
                .zip(&values[depth - 1])
                .map(|(p, v)| p * v)
                .sum();
            values[depth][s] = problem.rewards[s][a] + problem.discount * future;
        }
    }
    values
}

/// Default node cap for the exact belief-tree recursion.
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

/// Exact finite-horizon value of the belief-augmented problem at
/// `(belief, state)` with `depth` steps to go, by backward induction over
/// the reachable belief tree (observations here are the next states).
///
/// Exact for finite hypothesis sets; errors out if the reachable tree
/// outgrows `node_cap`.
pub fn exact_bayes_value(
    problem: &TinyBamdp,
    belief: &[f64],
    state: usize,
    depth: usize,
    node_cap: usize,
) -> Result<f64, TinyError> {
    let mut nodes = 0usize;
    bayes_value_rec(problem, belief, state, depth, node_cap, &mut nodes)
}

/// Root value at the prior and initial state over the full horizon.
pub fn exact_bayes_root_value(problem: &TinyBamdp) -> Result<f64, TinyError> {
    exact_bayes_value(
        problem,
        &problem.prior,
        problem.initial_state,
        problem.horizon,
        DEFAULT_NODE_CAP,
    )
}

fn bayes_value_rec(
    problem: &TinyBamdp,
    belief: &[f64],
    state: usize,
    depth: usize,
    node_cap: usize,
    nodes: &mut usize,
) -> Result<f64, TinyError> {
    *nodes += 1;
    if *nodes > node_cap {
        return Err(TinyError::BudgetExceeded(node_cap));
    }
    if depth == 0 {
        return Ok(0.0);
    }
    let mut best = f64::NEG_INFINITY;
    for a in 0..problem.actions {
        let mut q = problem.rewards[state][a];
        for s_next in 0..problem.states {
            // Predictive probability of observing s_next under the belief.
            let marginal: f64 = belief
                .iter()
                .enumerate()
                .map(|(k, b)| b * problem.transitions[k][state][a][s_next])
                .sum();
            if marginal <= 0.0 {
                continue;
            }
            // Posterior after observing s_next.
            let posterior: Vec<f64> = belief
                .iter()
                .enumerate()
                .map(|(k, b)| b * problem.transitions[k][state][a][s_next] / marginal)
                .collect();
            let v = bayes_value_rec(problem, &posterior, s_next, depth - 1, node_cap, nodes)?;
            q += problem.discount * marginal * v;
        }
        if q > best {
            best = q;
        }
    }
    Ok(best)
}

/// Bayes value of a fixed Markov policy: prior-weighted policy value.
pub fn fixed_policy_bayes_value(problem: &TinyBamdp, policy: &[Vec<usize>]) -> f64 {
    (0..problem.n_thetas())
        .map(|k| {
            problem.prior[k]
                * mdp_policy_value(problem, k, policy)[problem.horizon][problem.initial_state]
        })
        .sum()
}
