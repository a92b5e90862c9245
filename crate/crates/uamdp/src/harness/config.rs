//! Run configuration: a flat key–value file (TOML syntax, `#` comments)
//! with environment-variable overrides under the `UAMDP_` prefix.

use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvKind {
    Demo,
    Trading,
    Inventory,
    TinyBamdp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForecasterKind {
    Gp,
    Conjugate,
    Persistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    None,
    /// Replace the Thompson draw with the belief mode.
    NoThompson,
    /// Force the risk weight to zero.
    NoCvar,
    /// Freeze the belief at its prior; skip updates.
    NoBelief,
}

/// Every loop, risk, and approximation knob of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Discount factor γ ∈ (0,1).
    pub gamma: f64,
    /// Global interaction budget T.
    pub t_max: usize,
    /// Episodic horizon H (hypothesis redraw period).
    pub h: usize,
    /// CVaR tail level α ∈ (0,1).
    pub alpha: f64,
    /// Risk weight η ∈ [0,1].
    pub eta: f64,
    /// Chance-constraint tolerance δ ∈ (0,1).
    pub delta: f64,
    /// Particle count N for approximate filtering.
    pub n_particles: usize,
    /// Planner depth cap L.
    pub depth_limit: usize,
    pub rollout_budget: usize,
    pub leaf_samples: usize,
    pub exploration_const: f64,
    pub env: EnvKind,
    pub forecaster: ForecasterKind,
    pub risk_enabled: bool,
    pub ablation: Ablation,
    pub seeds: Vec<u64>,
    /// Length of the generated observation path (trading/inventory).
    pub path_length: usize,
    /// Proportional transaction cost on turnover.
    pub cost_rate: f64,
    /// Per-step regime switch probability of the generator.
    pub switch_prob: f64,
    /// Optional path to a problem JSON for `env = "tiny-bamdp"`.
    pub tiny_instance: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 0.97,
            t_max: 120,
            h: 10,
            alpha: 0.05,
            eta: 0.7,
            delta: 0.05,
            n_particles: 256,
            depth_limit: 2,
            rollout_budget: 96,
            leaf_samples: 16,
            exploration_const: std::f64::consts::SQRT_2,
            env: EnvKind::Trading,
            forecaster: ForecasterKind::Conjugate,
            risk_enabled: true,
            ablation: Ablation::None,
            seeds: vec![0],
            path_length: 400,
            cost_rate: 0.0002,
            switch_prob: 0.02,
            tiny_instance: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: &str| Err(ConfigError::Invalid(msg.into()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0,1)");
        }
        if self.h < 1 || self.t_max < self.h {
            return bad("need t_max >= h >= 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0,1)");
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("eta must lie in [0,1]");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0,1)");
        }
        if self.n_particles < 1 || self.depth_limit < 1 || self.rollout_budget < 1
            || self.leaf_samples < 1
        {
            return bad("n_particles, depth_limit, rollout_budget, leaf_samples must be >= 1");
        }
        if self.seeds.is_empty() {
            return bad("need at least one seed");
        }
        if self.path_length < 4 {
            return bad("path_length too short");
        }
        Ok(())
    }

    /// Loads a config file, then applies `UAMDP_*` environment overrides
    /// (e.g. `UAMDP_GAMMA=0.9`, `UAMDP_ENV=inventory`).
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })?;
        Self::from_toml_with_env(&text, std::env::vars())
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Self::from_toml_with_env(text, std::iter::empty())
    }

    /// Parses TOML text and applies overrides from the given variable
    /// iterator (injected for testability).
    pub fn from_toml_with_env(
        text: &str,
        vars: impl Iterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for (key, value) in vars {
            let Some(field) = key.strip_prefix("UAMDP_") else { continue };
            let field = field.to_ascii_lowercase();
            // A bare value is not a TOML document; wrap it to type it, and
            // fall back to a plain string (e.g. `UAMDP_ENV=trading`).
            let parsed = toml::Table::from_str(&format!("v = {value}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or(toml::Value::String(value));
            table.insert(field, parsed);
        }
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical commented config text for `demo`-style runs; doubles as
    /// the file-format reference.
    pub fn sample_toml() -> String {
        let d = RunConfig::default();
        format!(
            "# Run configuration (flat key-value; UAMDP_<KEY> env vars override)\n\
             gamma = {}            # discount factor, (0,1)\n\
             t_max = {}             # global interaction steps T\n\
             h = {}                  # episodic horizon H (hypothesis redraw period)\n\
             alpha = {}           # CVaR tail level\n\
             eta = {}               # risk weight: 0 = expectation only, 1 = pure tail\n\
             delta = {}            # chance-constraint tolerance\n\
             n_particles = {}\n\
             depth_limit = {}\n\
             rollout_budget = {}\n\
             leaf_samples = {}\n\
             exploration_const = {}\n\
             env = \"trading\"         # demo | trading | inventory | tiny-bamdp\n\
             forecaster = \"conjugate\" # gp | conjugate | persistence\n\
             risk_enabled = true\n\
             ablation = \"none\"       # none | no-thompson | no-cvar | no-belief\n\
             seeds = [0]\n\
             path_length = {}\n\
             cost_rate = {}\n\
             switch_prob = {}\n",
            d.gamma,
            d.t_max,
            d.h,
            d.alpha,
            d.eta,
            d.delta,
            d.n_particles,
            d.depth_limit,
            d.rollout_budget,
            d.leaf_samples,
            d.exploration_const,
            d.path_length,
            d.cost_rate,
            d.switch_prob,
        )
    }
}
