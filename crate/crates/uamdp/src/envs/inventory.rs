//! Synthetic seasonal inventory environment: single SKU, lost-sales
//! dynamics, margin reward with holding costs and per-unit stockout
//! penalties.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::generate::{seasonal_rate, DemandPath};
use crate::belief::LatentParam;
use crate::planner::{SimStep, SimulationModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InventoryState {
    pub on_hand: u32,
    /// Unfilled units from the last step. Demand is lost, not carried; the
    /// counter only feeds the stockout-yesterday feature.
    pub backorders: u32,
    pub price: f64,
    pub unit_cost: f64,
    pub holding_cost: f64,
    pub stockout_penalty: f64,
}

impl InventoryState {
    pub fn new(
        on_hand: u32,
        price: f64,
        unit_cost: f64,
        holding_cost: f64,
        stockout_penalty: f64,
    ) -> Self {
        Self { on_hand, backorders: 0, price, unit_cost, holding_cost, stockout_penalty }
    }
}

/// One inventory period: receive the order, serve demand, charge holding
/// cost on what remains and a per-unit penalty on what could not be served.
pub fn inventory_step(st: &InventoryState, order_qty: u32, demand: u32) -> (InventoryState, f64) {
    let available = st.on_hand + order_qty;
    let sold = available.min(demand);
    let end_on_hand = available - sold;
    let unmet = demand - sold;
    let reward = sold as f64 * (st.price - st.unit_cost)
        - st.holding_cost * end_on_hand as f64
        - st.stockout_penalty * unmet as f64;
    (
        InventoryState { on_hand: end_on_hand, backorders: unmet, ..*st },
        reward,
    )
}

/// Order-quantity grid `{0, step, 2·step, …, q_max}`.
pub fn order_grid(step: u32, q_max: u32) -> Vec<u32> {
    assert!(step > 0);
    (0..=q_max / step).map(|k| k * step).collect()
}

/// Path-driven control environment over a generated demand stream.
#[derive(Debug, Clone)]
pub struct InventoryEnv {
    pub path: DemandPath,
    pub state: InventoryState,
    pub t: usize,
    pub actions: Vec<u32>,
}

impl InventoryEnv {
    pub fn new(path: DemandPath, state: InventoryState, start_t: usize, actions: Vec<u32>) -> Self {
        assert!(start_t + 1 < path.len(), "path too short for start index");
        assert!(!actions.is_empty());
        Self { path, state, t: start_t, actions }
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn done(&self) -> bool {
        self.t + 1 >= self.path.len()
    }

    pub fn current_observation(&self) -> Vec<f64> {
        vec![f64::from(self.path.demand[self.t])]
    }

    /// Places an order and serves the next day's realized demand.
    pub fn execute(&mut self, action: usize) -> (Vec<f64>, f64) {
        assert!(!self.done(), "environment exhausted");
        let next_t = self.t + 1;
        let demand = self.path.demand[next_t];
        let (next, reward) = inventory_step(&self.state, self.actions[action], demand);
        self.state = next;
        self.t = next_t;
        (vec![f64::from(demand)], reward)
    }
}

/// Planner-side model: demand is Poisson around the hypothesis's seasonal
/// rate; future promo days are unknown, so the promo lift enters through
/// its expectation at `promo_prob`.
pub struct InventoryModel<'a> {
    pub actions: &'a [u32],
    pub promo_prob: f64,
}

/// Planning state carries the inventory position plus the day index the
/// seasonal rate is evaluated at.
#[derive(Debug, Clone)]
pub struct InventoryPlanState {
    pub inv: InventoryState,
    pub day: usize,
}

impl SimulationModel for InventoryModel<'_> {
    type State = InventoryPlanState;

    fn num_actions(&self) -> usize {
        self.actions.len()
    }

    fn step(
        &self,
        state: &InventoryPlanState,
        action: usize,
        theta: &LatentParam,
        rng: &mut ChaCha8Rng,
    ) -> SimStep<InventoryPlanState> {
        let promo = self.promo_prob > 0.0 && rng.gen_bool(self.promo_prob.clamp(0.0, 1.0));
        let rate = seasonal_rate(&theta.params, state.day + 1, promo);
        let demand = if rate > 0.0 {
            Poisson::new(rate).expect("positive rate").sample(rng) as u32
        } else {
            0
        };
        let (inv, reward) = inventory_step(&state.inv, self.actions[action], demand);
        SimStep {
            next: InventoryPlanState { inv, day: state.day + 1 },
            reward,
            terminal: false,
            observation: vec![f64::from(demand)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(on_hand: u32) -> InventoryState {
        InventoryState::new(on_hand, 10.0, 6.0, 0.1, 50.0)
    }

    #[test]
    fn idle_day_is_free() {
        let (next, reward) = inventory_step(&state(0), 0, 0);
        assert_relative_eq!(reward, 0.0);
        assert_eq!(next.on_hand, 0);
        assert_eq!(next.backorders, 0);
    }

    #[test]
    fn stockout_penalty_worked_example() {
        // 10 on hand, demand 15: margin 10·4, penalty 50·5 → −210.
        let (next, reward) = inventory_step(&state(10), 0, 15);
        assert_relative_eq!(reward, -210.0);
        assert_eq!(next.on_hand, 0);
        assert_eq!(next.backorders, 5);
    }

    #[test]
    fn exact_fill_has_no_holding_or_penalty() {
        let (next, reward) = inventory_step(&state(8), 4, 12);
        assert_relative_eq!(reward, 12.0 * 4.0);
        assert_eq!(next.on_hand, 0);
        assert_eq!(next.backorders, 0);
    }

    #[test]
    fn holding_cost_on_leftovers() {
        let (next, reward) = inventory_step(&state(10), 0, 4);
        assert_relative_eq!(reward, 4.0 * 4.0 - 0.1 * 6.0);
        assert_eq!(next.on_hand, 6);
    }

    #[test]
    fn sold_never_exceeds_demand_or_availability() {
        for on_hand in [0u32, 3, 10] {
            for order in [0u32, 5] {
                for demand in [0u32, 2, 9, 30] {
                    let (next, _) = inventory_step(&state(on_hand), order, demand);
                    let available = on_hand + order;
                    let sold = available - next.on_hand;
                    assert!(sold <= demand && sold <= available);
                    assert_eq!(next.backorders, demand - sold);
                }
            }
        }
    }

    #[test]
    fn order_grid_shape() {
        assert_eq!(order_grid(5, 20), vec![0, 5, 10, 15, 20]);
    }

    #[test]
    fn env_serves_path_demand() {
        use super::super::generate::{generate_demand, RegimeModel};
        let model = RegimeModel::new(vec![LatentParam::new(0, vec![10.0, 1.0, 0.0])], 0.0);
        let path = generate_demand(&model, 30, 11);
        let expected = path.demand[1];
        let mut env = InventoryEnv::new(path, state(100), 0, order_grid(5, 20));
        let (obs, _) = env.execute(0);
        assert_eq!(obs, vec![f64::from(expected)]);
        assert_eq!(env.t, 1);
    }
}
