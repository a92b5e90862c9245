//! The runnable surface: configuration, the online control loop, the
//! scripted walkthrough, ablations, the regret grid, robustness sweeps,
//! and result export.

pub mod ablation;
pub mod config;
pub mod demo;
pub mod export;
pub mod log;
pub mod regret_suite;
pub mod robustness;
pub mod run;

pub use ablation::{run_ablation, AblationOutput, AblationReport, PairedComparison};
pub use config::{Ablation, ConfigError, EnvKind, ForecasterKind, RunConfig};
pub use demo::{run_demo, DemoReport, DemoRow, DEMO_DRAWS, DEMO_PRICES};
pub use export::{
    export_demo_csv, export_forecast_report_csv, export_json, export_log_jsonl,
    export_metrics_csv, export_plot_bundle, export_regret_csv, load_log_jsonl, ExportError,
};
pub use log::{EpisodeLog, LoopEvent, StepRecord};
pub use regret_suite::{run_regret_suite, RegretRow, RegretSuite};
pub use robustness::{run_noise_robustness, NoiseLevelResult, RobustnessReport};
pub use run::{
    run_uamdp, inventory_regimes, trading_regimes, RunError, RunOutput, SeedRun, TinySimModel,
};
