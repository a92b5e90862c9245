//! Synthetic regime-switching trading environment: three assets (cash, long
//! index, bond ETF) with a finite allocation grid and proportional
//! transaction costs on turnover.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generate::{MarketPath, BOND_DRIFT};
use crate::belief::LatentParam;
use crate::forecaster::Forecaster;
use crate::planner::{SimStep, SimulationModel};

/// Portfolio snapshot. `position` holds weights over (cash, index, bond),
/// non-negative and summing to one; `prices` tracks (index, bond).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradingState {
    pub prices: [f64; 2],
    pub position: [f64; 3],
    pub portfolio_value: f64,
    pub cost_rate: f64,
}

impl TradingState {
    pub fn new(prices: [f64; 2], position: [f64; 3], portfolio_value: f64, cost_rate: f64) -> Self {
        debug_assert!((position.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        debug_assert!(portfolio_value > 0.0);
        Self { prices, position, portfolio_value, cost_rate }
    }
}

/// Rebalances to allocation `target`, applies per-asset simple returns
/// `(index, bond)` (cash earns zero), and returns the new state plus the
/// realized portfolio log-return net of costs.
///
/// Cost = `cost_rate · turnover · V`, with turnover the L1 weight change
/// halved, so a full cash→index flip costs one unit of `cost_rate`.
pub fn trading_step(
    st: &TradingState,
    target: [f64; 3],
    next_returns: [f64; 2],
) -> (TradingState, f64) {
    let turnover: f64 = st
        .position
        .iter()
        .zip(&target)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / 2.0;
    let after_cost = st.portfolio_value * (1.0 - st.cost_rate * turnover);
    let growth = [1.0, 1.0 + next_returns[0], 1.0 + next_returns[1]];
    let gross: f64 = target.iter().zip(&growth).map(|(w, g)| w * g).sum();
    let value = after_cost * gross;
    let position = [
        target[0] * growth[0] / gross,
        target[1] * growth[1] / gross,
        target[2] * growth[2] / gross,
    ];
    let prices = [
        st.prices[0] * (1.0 + next_returns[0]),
        st.prices[1] * (1.0 + next_returns[1]),
    ];
    let reward = (value / st.portfolio_value).ln();
    (
        TradingState { prices, position, portfolio_value: value, cost_rate: st.cost_rate },
        reward,
    )
}

/// Allocation grid: index weight in steps of 10% with the remainder in
/// cash, plus a pure bond-ETF stance.
pub fn default_allocation_grid() -> Vec<[f64; 3]> {
    let mut grid: Vec<[f64; 3]> = (0..=10)
        .map(|k| {
            let w = k as f64 / 10.0;
            [1.0 - w, w, 0.0]
        })
        .collect();
    grid.push([0.0, 0.0, 1.0]);
    grid
}

/// Path-driven control environment over a generated market.
#[derive(Debug, Clone)]
pub struct TradingEnv {
    pub path: MarketPath,
    pub state: TradingState,
    /// Index of the current day in the path.
    pub t: usize,
    pub actions: Vec<[f64; 3]>,
}

impl TradingEnv {
    /// Starts all-cash at day `start_t` of the path (which must leave at
    /// least one future step).
    pub fn new(path: MarketPath, cost_rate: f64, start_t: usize) -> Self {
        assert!(start_t + 1 < path.len(), "path too short for start index");
        let prices = [path.prices[start_t], path.bond_prices[start_t]];
        Self {
            path,
            state: TradingState::new(prices, [1.0, 0.0, 0.0], 1.0, cost_rate),
            t: start_t,
            actions: default_allocation_grid(),
        }
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn done(&self) -> bool {
        self.t + 1 >= self.path.len()
    }

    /// Observation at the current day: the index log-return, which is what
    /// the regime hypotheses explain.
    pub fn current_observation(&self) -> Vec<f64> {
        if self.t == 0 {
            vec![0.0]
        } else {
            vec![self.path.log_return(self.t)]
        }
    }

    /// Executes an allocation for the next day; returns the realized next
    /// observation and the net portfolio log-return.
    pub fn execute(&mut self, action: usize) -> (Vec<f64>, f64) {
        assert!(!self.done(), "environment exhausted");
        let next_t = self.t + 1;
        let r_index = self.path.prices[next_t] / self.path.prices[self.t] - 1.0;
        let r_bond = self.path.bond_prices[next_t] / self.path.bond_prices[self.t] - 1.0;
        let (next, reward) = trading_step(&self.state, self.actions[action], [r_index, r_bond]);
        self.state = next;
        self.t = next_t;
        (vec![self.path.log_return(next_t)], reward)
    }
}

/// Planner-side model: dynamics follow the forecaster conditioned on the
/// frozen root features and the sampled hypothesis. The bond leg is
/// deterministic at its drift; lookahead risk concentrates in the index.
pub struct TradingModel<'a, F: Forecaster> {
    pub forecaster: &'a F,
    pub root_features: Vec<f64>,
    pub actions: &'a [[f64; 3]],
}

impl<F: Forecaster> SimulationModel for TradingModel<'_, F> {
    type State = TradingState;

    fn num_actions(&self) -> usize {
        self.actions.len()
    }

    fn step(
        &self,
        state: &TradingState,
        action: usize,
        theta: &LatentParam,
        rng: &mut ChaCha8Rng,
    ) -> SimStep<TradingState> {
        let pred = self.forecaster.predict(&self.root_features, theta);
        let x = pred.sample_with(rng);
        let r_index = x[0].exp() - 1.0;
        let r_bond = BOND_DRIFT.exp_m1();
        let (next, reward) = trading_step(state, self.actions[action], [r_index, r_bond]);
        SimStep { next, reward, terminal: false, observation: x }
    }
}
