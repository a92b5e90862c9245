//! Belief-tracking, Thompson-sampling control with risk-aware tree-search
//! planning over probabilistic forecasts.
//!
//! The crate wires five layers into one closed loop:
//!
//! 1. [`forecaster`]: probabilistic one-step forecasters (exact GP,
//!    conjugate scalar-Gaussian, persistence baseline) whose predictive
//!    densities double as belief-update likelihoods;
//! 2. [`belief`]: exact and particle posteriors over latent environment
//!    parameters, with Thompson draws;
//! 3. [`planner`]: depth-bounded UCT search under a sampled hypothesis,
//!    scoring leaves with a blended mean/CVaR objective from [`risk`];
//! 4. [`envs`]: simulatable market, inventory, and walkthrough
//!    environments plus feature engineering and synthetic generators;
//! 5. [`oracle`]: exact solvers on tiny finite problems that pin down the
//!    regret behaviour of the whole stack, with [`metrics`] and
//!    [`harness`] providing evaluation and the runnable control loop.
//!
//! Start with the `examples/` directory: each file is a runnable tour of
//! one capability (`cargo run --release --example demo_walkthrough`).

pub mod belief;
pub mod envs;
pub mod forecaster;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod planner;
pub mod risk;
pub mod shipped;

pub use belief::{Belief, BeliefError, LatentParam, ParticleFilterConfig};
pub use forecaster::{Forecaster, PredictiveDist};
pub use planner::{plan, PlanDiagnostics, PlannerConfig, SimulationModel};
pub use risk::{blended_objective, cvar, ReturnDistribution, RiskConfig};
