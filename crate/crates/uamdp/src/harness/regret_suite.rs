//! Regret grid over approximation budgets: particle counts at full depth
//! and planning depths under exact filtering, per instance, each cell
//! checked against the additive error bound.

use serde::{Deserialize, Serialize};

use crate::oracle::{
    bayes_regret, error_bound, EpisodicAgent, FilterKind, OracleAgent, RandomAgent, RegretReport,
    TinyBamdp,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretRow {
    pub instance: String,
    pub agent: String,
    pub n_particles: Option<usize>,
    pub depth: Option<usize>,
    pub report: RegretReport,
    /// Additive bound evaluated at the measured budgets.
    pub error_bound: f64,
    /// Statistical check: mean regret within one-sided 95% noise of the
    /// bound (the bound itself is exact; the measured gap is Monte Carlo).
    pub bound_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretSuite {
    pub episodes: usize,
    pub rows: Vec<RegretRow>,
}

fn make_row(
    problem: &TinyBamdp,
    agent_label: String,
    n_particles: Option<usize>,
    depth: Option<usize>,
    agent: &mut dyn EpisodicAgent,
    episodes: usize,
    seed: u64,
) -> RegretRow {
    let report = bayes_regret(problem, agent, episodes, seed);
    let bound = error_bound(&report.budget(problem.r_max()), problem.discount);
    let bound_ok = report.mean_regret <= bound + 1.96 * report.std_error + 1e-9;
    RegretRow {
        instance: problem.name.clone(),
        agent: agent_label,
        n_particles,
        depth,
        report,
        error_bound: bound,
        bound_ok,
    }
}

/// Runs the full grid: exact/full and random baselines, the particle
/// ladder at full depth, and the depth ladder under exact filtering.
pub fn run_regret_suite(
    instances: &[TinyBamdp],
    n_list: &[usize],
    l_list: &[usize],
    episodes: usize,
    seed: u64,
) -> RegretSuite {
    let mut rows = Vec::new();
    for problem in instances {
        let mut exact = OracleAgent::exact_full(problem.clone());
        rows.push(make_row(problem, "exact-full".into(), None, None, &mut exact, episodes, seed));

        let mut random = RandomAgent::new(problem.actions);
        rows.push(make_row(problem, "random".into(), None, None, &mut random, episodes, seed));

        for &n in n_list {
            let mut agent = OracleAgent::new(
                problem.clone(),
                FilterKind::Particle { n_particles: n, resample_threshold: 0.5 },
                None,
            );
            rows.push(make_row(
                problem,
                format!("particle-{n}"),
                Some(n),
                None,
                &mut agent,
                episodes,
                seed,
            ));
        }
        for &l in l_list {
            let mut agent = OracleAgent::new(problem.clone(), FilterKind::Exact, Some(l));
            rows.push(make_row(
                problem,
                format!("depth-{l}"),
                None,
                Some(l),
                &mut agent,
                episodes,
                seed,
            ));
        }
    }
    RegretSuite { episodes, rows }
}

impl RegretSuite {
    pub fn rows_for(&self, instance: &str) -> Vec<&RegretRow> {
        self.rows.iter().filter(|r| r.instance == instance).collect()
    }

    /// Mean regrets along the particle ladder, in `n_list` order.
    pub fn particle_trend(&self, instance: &str) -> Vec<(usize, f64, f64)> {
        let mut rows: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.instance == instance && r.n_particles.is_some())
            .map(|r| (r.n_particles.unwrap(), r.report.mean_regret, r.report.std_error))
            .collect();
        rows.sort_by_key(|&(n, _, _)| n);
        rows
    }

    /// Mean regrets along the depth ladder, in increasing depth order.
    pub fn depth_trend(&self, instance: &str) -> Vec<(usize, f64, f64)> {
        let mut rows: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.instance == instance && r.depth.is_some())
            .map(|r| (r.depth.unwrap(), r.report.mean_regret, r.report.std_error))
            .collect();
        rows.sort_by_key(|&(l, _, _)| l);
        rows
    }

    /// Mean per-step filter errors along the particle ladder (the
    /// episode-start prior representation included).
    pub fn filter_error_trend(&self, instance: &str) -> Vec<(usize, f64)> {
        let mut rows: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.instance == instance && r.n_particles.is_some())
            .map(|r| (r.n_particles.unwrap(), r.report.mean_filter_l1))
            .collect();
        rows.sort_by_key(|&(n, _)| n);
        rows
    }

    /// Median per-step filter errors along the particle ladder.
    pub fn filter_error_median_trend(&self, instance: &str) -> Vec<(usize, f64)> {
        let mut rows: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.instance == instance && r.n_particles.is_some())
            .map(|r| (r.n_particles.unwrap(), r.report.median_filter_l1))
            .collect();
        rows.sort_by_key(|&(n, _)| n);
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "instance,agent,n_particles,depth,episodes,mean_regret,std_error,ci_lo,ci_hi,\
             max_q_gap,max_filter_l1,median_filter_l1,mean_filter_l1,error_bound,bound_ok\n",
        );
        for r in &self.rows {
            let (lo, hi) = r.report.ci95();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.instance,
                r.agent,
                r.n_particles.map_or(String::new(), |n| n.to_string()),
                r.depth.map_or(String::new(), |l| l.to_string()),
                r.report.episodes,
                r.report.mean_regret,
                r.report.std_error,
                lo,
                hi,
                r.report.max_q_gap,
                r.report.max_filter_l1,
                r.report.median_filter_l1,
                r.report.mean_filter_l1,
                r.error_bound,
                r.bound_ok,
            ));
        }
        out
    }
}
