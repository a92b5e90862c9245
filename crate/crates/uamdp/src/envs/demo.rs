//! Two-step walkthrough environment: one equity index against flat cash,
//! holdings-based accounting, and a three-stance allocation grid
//! (defensive 20%, neutral 50%, aggressive 80% equity).
//!
//! Trades execute only when the commanded stance differs from the current
//! one; holding a stance lets the dollar positions ride. Costs default to
//! zero here so the worked numbers come out exact; the scenario's headline
//! path (100 → 102 → 101.5 with a switch to 80% at the start) ends at a
//! portfolio value of 101.2 per 100 invested.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::LatentParam;
use crate::planner::{SimStep, SimulationModel};

/// Equity-weight stances available to the walkthrough agent.
pub const DEMO_EQUITY_GRID: [f64; 3] = [0.2, 0.5, 0.8];

/// Grid index of the 50% starting stance.
pub const DEMO_NEUTRAL_ACTION: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoState {
    pub index_units: f64,
    pub cash: f64,
    pub price: f64,
    /// Stance currently held (an entry of the grid).
    pub target_equity: f64,
    pub cost_rate: f64,
}

impl DemoState {
    /// Starts at the neutral 50/50 stance with the given capital.
    pub fn start(initial_value: f64, price: f64, cost_rate: f64) -> Self {
        let equity_value = 0.5 * initial_value;
        Self {
            index_units: equity_value / price,
            cash: initial_value - equity_value,
            price,
            target_equity: DEMO_EQUITY_GRID[DEMO_NEUTRAL_ACTION],
            cost_rate,
        }
    }

    pub fn value(&self) -> f64 {
        self.index_units * self.price + self.cash
    }

    pub fn equity_weight(&self) -> f64 {
        self.index_units * self.price / self.value()
    }

    /// Commands a stance, trading only when it differs from the held one,
    /// then applies the next price. Returns the realized log-return.
    pub fn step(&self, target_equity: f64, next_price: f64) -> (DemoState, f64) {
        let before = self.value();
        let mut st = self.clone();
        if (target_equity - st.target_equity).abs() > 1e-12 {
            let value = st.value();
            let current_w = st.equity_weight();
            let cost = st.cost_rate * (target_equity - current_w).abs() * value;
            let after_cost = value - cost;
            st.index_units = target_equity * after_cost / st.price;
            st.cash = after_cost * (1.0 - target_equity);
            st.target_equity = target_equity;
        }
        st.price = next_price;
        let reward = (st.value() / before).ln();
        (st, reward)
    }
}

/// Planner model for the walkthrough: the sampled hypothesis *is* the
/// scenario: `theta.params[0]` is the next-period log-return, applied
/// deterministically.
pub struct DemoModel;

impl SimulationModel for DemoModel {
    type State = DemoState;

    fn num_actions(&self) -> usize {
        DEMO_EQUITY_GRID.len()
    }

    fn step(
        &self,
        state: &DemoState,
        action: usize,
        theta: &LatentParam,
        _rng: &mut ChaCha8Rng,
    ) -> SimStep<DemoState> {
        let scenario_return = theta.params[0];
        let next_price = state.price * scenario_return.exp();
        let (next, reward) = state.step(DEMO_EQUITY_GRID[action], next_price);
        SimStep { next, reward, terminal: false, observation: vec![scenario_return] }
    }
}
