//! The hyper-state: observable history paired with the current belief.
//! Together they form the Markov state of the belief-augmented process;
//! the transition depends only on the current pair, never on how it was
//! reached.

use serde::{Deserialize, Serialize};

use crate::belief::{Belief, BeliefError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperState {
    /// Observations x_1..x_t.
    pub history: Vec<Vec<f64>>,
    /// Actions a_0..a_{t−1}.
    pub past_actions: Vec<usize>,
    pub belief: Belief,
    pub t: usize,
}

impl HyperState {
    pub fn initial(belief: Belief) -> Self {
        Self { history: Vec::new(), past_actions: Vec::new(), belief, t: 0 }
    }

    pub fn latest_observation(&self) -> Option<&[f64]> {
        self.history.last().map(Vec::as_slice)
    }
}

/// Advances the hyper-state: appends the action and next observation,
/// refreshes the belief with the per-hypothesis likelihoods of that
/// observation, and bumps the clock.
pub fn hyperstate_transition(
    hyper: &HyperState,
    action: usize,
    x_next: Vec<f64>,
    likelihoods: &[f64],
) -> Result<HyperState, BeliefError> {
    let belief = hyper.belief.bayes_update(likelihoods)?;
    let mut history = hyper.history.clone();
    history.push(x_next);
    let mut past_actions = hyper.past_actions.clone();
    past_actions.push(action);
    Ok(HyperState { history, past_actions, belief, t: hyper.t + 1 })
}
