//! Simulatable decision environments and their observation pipelines: the
//! two-step walkthrough market, a regime-switching trading environment, a
//! seasonal inventory environment, feature engineering, and seeded
//! synthetic-data generators.

pub mod demo;
pub mod features;
pub mod generate;
pub mod hyperstate;
pub mod inventory;
pub mod toy;
pub mod trading;

pub use demo::{DemoModel, DemoState, DEMO_EQUITY_GRID, DEMO_NEUTRAL_ACTION};
pub use features::{
    features_inventory, features_trading, inventory_layout, trading_layout, FeatureError,
    FeatureScaler, FeatureSpec, INVENTORY_WARMUP, TRADING_CLOCK_PERIOD, TRADING_WARMUP,
};
pub use generate::{
    generate_demand, generate_demand_with, generate_market, seasonal_rate, DemandPath, MarketPath,
    RegimeModel, BOND_DRIFT, BOND_VOL,
};
pub use hyperstate::{hyperstate_transition, HyperState};
pub use inventory::{
    inventory_step, order_grid, InventoryEnv, InventoryModel, InventoryPlanState, InventoryState,
};
pub use toy::{toy_mc_root_values, ToyState, TwoStepToy};
pub use trading::{default_allocation_grid, trading_step, TradingEnv, TradingModel, TradingState};
