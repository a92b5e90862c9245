//! Thin command-line front end over the library. Exit codes: 0 on success,
//! 2 on configuration errors, 3 when a run completed but logged
//! infeasibility events (output is still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uamdp::harness::{
    export_demo_csv, export_json, export_log_jsonl, export_metrics_csv, export_plot_bundle,
    export_regret_csv, run_ablation, run_demo, run_noise_robustness, run_regret_suite, run_uamdp,
    Ablation, EnvKind, ForecasterKind, RunConfig, RunOutput,
};
use uamdp::metrics;
use uamdp::oracle::{instances, TinyBamdp};

#[derive(Parser)]
#[command(name = "uamdp", about = "Belief-tracking risk-aware control loop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags that mirror the run-configuration fields; unset flags fall back
/// to the config file (or its defaults).
#[derive(Args, Clone, Default)]
struct ConfigFlags {
    /// Path to a key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    n_particles: Option<usize>,
    #[arg(long)]
    depth_limit: Option<usize>,
    #[arg(long)]
    rollout_budget: Option<usize>,
    #[arg(long)]
    leaf_samples: Option<usize>,
    /// demo | trading | inventory | tiny-bamdp
    #[arg(long)]
    env: Option<String>,
    /// gp | conjugate | persistence
    #[arg(long)]
    forecaster: Option<String>,
    #[arg(long)]
    risk_enabled: Option<bool>,
    /// none | no-thompson | no-cvar | no-belief
    #[arg(long)]
    ablation: Option<String>,
    /// Repeatable.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    #[arg(long)]
    path_length: Option<usize>,
    #[arg(long)]
    cost_rate: Option<f64>,
    #[arg(long)]
    switch_prob: Option<f64>,
    #[arg(long)]
    tiny_instance: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Scripted two-step walkthrough with pinned prices and draws.
    Demo {
        #[command(flatten)]
        flags: ConfigFlags,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// The full control loop on the configured environment.
    Run {
        #[command(flatten)]
        flags: ConfigFlags,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Paired comparison of the full loop against an ablated variant.
    Ablate {
        #[command(flatten)]
        flags: ConfigFlags,
        /// no-thompson | no-cvar | no-belief | none
        #[arg(long)]
        which: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regret grid over particle counts and planning depths on shipped
    /// (or user-provided) tiny instances.
    Regret {
        /// Directory of instance JSON files; defaults to the built-ins.
        #[arg(long)]
        instances: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        episodes: usize,
        /// Comma-separated particle ladder.
        #[arg(long, default_value = "4,16,64")]
        particles: String,
        /// Comma-separated depth ladder ("h" = full horizon).
        #[arg(long, default_value = "1,2,h")]
        depths: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Feature-noise robustness sweep on the GP trading loop.
    Robustness {
        #[command(flatten)]
        flags: ConfigFlags,
        /// Comma-separated noise fractions.
        #[arg(long, default_value = "0,0.1,0.2,0.3")]
        fracs: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Recompute metrics from a saved JSON-lines log.
    Export {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Run(m) => write!(f, "{m}"),
        }
    }
}

fn parse_enum<T: serde::de::DeserializeOwned>(raw: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_value(serde_json::Value::String(raw.to_string()))
        .map_err(|_| CliError::Config(format!("invalid {what}: {raw}")))
}

fn build_config(flags: &ConfigFlags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path).map_err(|e| CliError::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($field:ident) => {
            if let Some(v) = flags.$field {
                cfg.$field = v;
            }
        };
    }
    take!(gamma);
    take!(t_max);
    take!(h);
    take!(alpha);
    take!(eta);
    take!(delta);
    take!(n_particles);
    take!(depth_limit);
    take!(rollout_budget);
    take!(leaf_samples);
    take!(risk_enabled);
    take!(path_length);
    take!(cost_rate);
    take!(switch_prob);
    if let Some(env) = &flags.env {
        cfg.env = parse_enum::<EnvKind>(env, "env")?;
    }
    if let Some(fc) = &flags.forecaster {
        cfg.forecaster = parse_enum::<ForecasterKind>(fc, "forecaster")?;
    }
    if let Some(ab) = &flags.ablation {
        cfg.ablation = parse_enum::<Ablation>(ab, "ablation")?;
    }
    if !flags.seeds.is_empty() {
        cfg.seeds = flags.seeds.clone();
    }
    if let Some(t) = &flags.tiny_instance {
        cfg.tiny_instance = Some(t.clone());
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| CliError::Config(format!("bad {what} entry: {s}"))))
        .collect()
}

fn write_runs(out: &Path, output: &RunOutput) -> Result<(), CliError> {
    export_metrics_csv(&out.join("metrics.csv"), &output.runs)
        .map_err(|e| CliError::Run(e.to_string()))?;
    for run in &output.runs {
        export_log_jsonl(&out.join(format!("log_seed{}.jsonl", run.seed)), &run.log)
            .map_err(|e| CliError::Run(e.to_string()))?;
    }
    export_plot_bundle(&out.join("plots"), &output.runs, None)
        .map_err(|e| CliError::Run(e.to_string()))?;
    Ok(())
}

fn had_infeasibility(output: &RunOutput) -> bool {
    output.runs.iter().any(|r| r.log.had_infeasible_events())
}

fn load_instances(dir: &Option<PathBuf>) -> Result<Vec<TinyBamdp>, CliError> {
    match dir {
        None => Ok(instances::all_reference_instances()),
        Some(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(CliError::Config(format!("no .json instances in {}", dir.display())));
            }
            paths
                .iter()
                .map(|p| TinyBamdp::load(p).map_err(|e| CliError::Config(e.to_string())))
                .collect()
        }
    }
}

fn execute(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Demo { flags, out } => {
            let mut cfg = build_config(&flags)?;
            cfg.env = EnvKind::Demo;
            let seed = cfg.seeds.first().copied().unwrap_or(0);
            let report = run_demo(&cfg, seed).map_err(|e| CliError::Run(e.to_string()))?;
            println!("walkthrough trace:");
            println!("  t  price    r_t       mu        sigma^2     action  equity");
            for row in &report.rows {
                println!(
                    "  {}  {:<7} {:<9} {:<9.6} {:<11.3e} {:<7} {:.0}%",
                    row.t,
                    row.price,
                    row.realized_return.map_or("-".into(), |r| format!("{r:.4}")),
                    row.mu,
                    row.sigma_sq,
                    row.action,
                    row.equity_weight * 100.0,
                );
            }
            println!(
                "final value {:.1} per 100 (${:.0} on the narrative scale); ride-50/50 {:.2}",
                report.final_value, report.final_value_dollars, report.buy_hold_value
            );
            export_demo_csv(&out.join("demo_table.csv"), &report)
                .map_err(|e| CliError::Run(e.to_string()))?;
            export_log_jsonl(&out.join("demo_log.jsonl"), &report.log)
                .map_err(|e| CliError::Run(e.to_string()))?;
            let run = report.into_seed_run(seed);
            export_metrics_csv(&out.join("metrics.csv"), std::slice::from_ref(&run))
                .map_err(|e| CliError::Run(e.to_string()))?;
            println!("wrote {}", out.display());
            Ok(false)
        }
        Command::Run { flags, out } => {
            let cfg = build_config(&flags)?;
            let output = run_uamdp(&cfg).map_err(|e| CliError::Run(e.to_string()))?;
            write_runs(&out, &output)?;
            for run in &output.runs {
                let line: Vec<String> = run
                    .metrics
                    .iter()
                    .map(|(k, v)| format!("{k}={v:.6}"))
                    .collect();
                println!("seed {}: {}", run.seed, line.join(" "));
            }
            println!("wrote {}", out.display());
            Ok(had_infeasibility(&output))
        }
        Command::Ablate { flags, which, out } => {
            let cfg = build_config(&flags)?;
            let which: Ablation = parse_enum(&which, "ablation")?;
            let result = run_ablation(&cfg, which).map_err(|e| CliError::Run(e.to_string()))?;
            for cmp in &result.report.comparisons {
                println!(
                    "{}: full {:.6} vs ablated {:.6} (p[full>ablated] = {})",
                    cmp.metric,
                    cmp.mean_full,
                    cmp.mean_ablated,
                    cmp.p_full_greater.map_or("n/a".into(), |p| format!("{p:.4}")),
                );
            }
            export_json(&out.join("ablation.json"), &result.report)
                .map_err(|e| CliError::Run(e.to_string()))?;
            write_runs(&out.join("full"), &result.full)?;
            write_runs(&out.join("ablated"), &result.ablated)?;
            println!("wrote {}", out.display());
            Ok(had_infeasibility(&result.full) || had_infeasibility(&result.ablated))
        }
        Command::Regret { instances, episodes, particles, depths, seed, out } => {
            let problems = load_instances(&instances)?;
            let n_list: Vec<usize> = parse_list(&particles, "particles")?;
            let mut l_list: Vec<usize> = Vec::new();
            for token in depths.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if token.eq_ignore_ascii_case("h") {
                    l_list.push(problems.iter().map(|p| p.horizon).max().unwrap_or(1));
                } else {
                    l_list.push(
                        token
                            .parse()
                            .map_err(|_| CliError::Config(format!("bad depth entry: {token}")))?,
                    );
                }
            }
            let suite = run_regret_suite(&problems, &n_list, &l_list, episodes, seed);
            for row in &suite.rows {
                let (lo, hi) = row.report.ci95();
                println!(
                    "{:<15} {:<12} regret {:+.4} ci [{:+.4},{:+.4}] bound {:.3} ok={}",
                    row.instance, row.agent, row.report.mean_regret, lo, hi, row.error_bound,
                    row.bound_ok,
                );
            }
            export_regret_csv(&out.join("regret.csv"), &suite)
                .map_err(|e| CliError::Run(e.to_string()))?;
            println!("wrote {}", out.display());
            Ok(false)
        }
        Command::Robustness { flags, fracs, sigma, out } => {
            let cfg = build_config(&flags)?;
            let fracs: Vec<f64> = parse_list(&fracs, "fracs")?;
            let report = run_noise_robustness(&cfg, &fracs, sigma)
                .map_err(|e| CliError::Run(e.to_string()))?;
            for level in &report.levels {
                println!(
                    "noise_frac {:.2}: mean reward {:+.6} (ratio {:.3})",
                    level.noise_frac, level.mean_reward, level.ratio_vs_clean
                );
            }
            export_json(&out.join("robustness.json"), &report)
                .map_err(|e| CliError::Run(e.to_string()))?;
            println!("wrote {}", out.display());
            Ok(false)
        }
        Command::Export { log, out } => {
            let loaded = uamdp::harness::load_log_jsonl(&log)
                .map_err(|e| CliError::Run(e.to_string()))?;
            let rewards = loaded.rewards();
            let mut metric_rows: Vec<(String, f64)> = vec![
                ("steps".into(), loaded.records.len() as f64),
                ("mean_reward".into(), loaded.mean_reward()),
            ];
            if rewards.len() >= 2 {
                if let Ok(s) = metrics::sharpe_daily(&rewards) {
                    metric_rows.push(("sharpe_daily".into(), s));
                }
            }
            let mut csv = String::from("metric,value\n");
            for (k, v) in &metric_rows {
                csv.push_str(&format!("{k},{v}\n"));
            }
            std::fs::create_dir_all(&out)
                .map_err(|e| CliError::Run(format!("cannot create {}: {e}", out.display())))?;
            std::fs::write(out.join("recomputed_metrics.csv"), csv)
                .map_err(|e| CliError::Run(e.to_string()))?;
            println!("wrote {}", out.display());
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("note: infeasibility events occurred (see log events)");
            ExitCode::from(3)
        }
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
