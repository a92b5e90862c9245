//! Exact solvers on tiny finite problems, episodic agents over them, and
//! the regret/error-bound instrumentation that pins down how the full stack
//! degrades with particle count and planning depth.

pub mod agents;
pub mod instances;
pub mod regret;
pub mod tiny;

pub use agents::{EpisodicAgent, FilterKind, OracleAgent, RandomAgent};
pub use regret::{bayes_regret, error_bound, error_bound_check, ErrorBudget, RegretReport};
pub use tiny::{
    exact_bayes_root_value, exact_bayes_value, exact_mdp_optimal, fixed_policy_bayes_value,
    mdp_policy_value, MdpSolution, TinyBamdp, TinyError, DEFAULT_NODE_CAP,
};
