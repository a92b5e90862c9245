//! Structured run logs: one record per interaction step plus loop-level
//! events. Serialization order is fixed by struct order, so identical runs
//! produce byte-identical JSON lines.

use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::planner::PlanDiagnostics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Global interaction step n.
    pub n: usize,
    /// Episode index k.
    pub episode: usize,
    /// Step within the episode.
    pub t: usize,
    /// Hypothesis id committed for the episode (index into the hypothesis
    /// set; scripted scenarios use the draw index).
    pub theta_id: usize,
    /// Compact environment summary (layout documented per environment).
    pub state_summary: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub belief_entropy: f64,
    /// Post-update belief snapshot ({hypotheses, weights}); absent for
    /// closed-form scalar beliefs.
    pub belief: Option<Belief>,
    /// Root diagnostics of the planner call behind this action.
    pub plan: Option<PlanDiagnostics>,
}

/// Loop-level events worth surfacing in exports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LoopEvent {
    /// Every root action failed the chance constraint; the logged action is
    /// the least-violating fallback.
    InfeasibleFallback { n: usize, action: usize },
    /// The observation was impossible under every hypothesis; the belief
    /// was reset to its episode-start state.
    BeliefReset { n: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub records: Vec<StepRecord>,
    pub events: Vec<LoopEvent>,
}

impl EpisodeLog {
    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward).collect()
    }

    pub fn mean_reward(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.rewards().iter().sum::<f64>() / self.records.len() as f64
    }

    pub fn entropy_trace(&self) -> Vec<(usize, f64)> {
        self.records.iter().map(|r| (r.n, r.belief_entropy)).collect()
    }

    pub fn had_infeasible_events(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, LoopEvent::InfeasibleFallback { .. }))
    }

    /// One JSON object per line, records then events.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("serializable record"));
            out.push('\n');
        }
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializable event"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize) -> StepRecord {
        StepRecord {
            n,
            episode: n / 2,
            t: n % 2,
            theta_id: 0,
            state_summary: vec![1.0, 2.0],
            action: 1,
            reward: 0.5,
            belief_entropy: 0.69,
            belief: None,
            plan: None,
        }
    }

    #[test]
    fn jsonl_is_deterministic() {
        let log = EpisodeLog {
            records: vec![record(0), record(1)],
            events: vec![LoopEvent::BeliefReset { n: 1 }],
        };
        assert_eq!(log.to_jsonl(), log.to_jsonl());
        assert_eq!(log.to_jsonl().lines().count(), 3);
    }

    #[test]
    fn aggregates() {
        let log = EpisodeLog { records: vec![record(0), record(1)], events: vec![] };
        assert!((log.mean_reward() - 0.5).abs() < 1e-12);
        assert_eq!(log.entropy_trace().len(), 2);
        assert!(!log.had_infeasible_events());
    }
}
