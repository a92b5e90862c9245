//! The control loop on the seasonal inventory environment: demand-regime
//! tracking, order planning on a quantity grid, and the service metrics.
//!
//!     cargo run --release --example inventory_control

use uamdp::harness::{run_uamdp, EnvKind, RunConfig};

fn main() {
    let cfg = RunConfig {
        env: EnvKind::Inventory,
        t_max: 180,
        h: 10,
        seeds: vec![0, 1, 2],
        ..Default::default()
    };
    let out = run_uamdp(&cfg).expect("inventory loop runs");

    println!("seasonal two-regime demand, {} days, {} seeds:", cfg.t_max, cfg.seeds.len());
    println!(
        "  {:<5} {:>12} {:>14} {:>14} {:>8}",
        "seed", "mean reward", "service level", "stockout/day", "GMROI"
    );
    for run in &out.runs {
        println!(
            "  {:<5} {:>12.3} {:>13.1}% {:>14.3} {:>8.2}",
            run.seed,
            run.metric("mean_reward").unwrap(),
            run.metric("service_level").unwrap() * 100.0,
            run.metric("stockout_rate").unwrap(),
            run.metric("gmroi").unwrap(),
        );
    }

    let trace = out.runs[0].inventory.as_ref().unwrap();
    let total_demand: f64 = trace.demand.iter().sum();
    let total_filled: f64 = trace.filled.iter().sum();
    println!(
        "\nseed 0 served {total_filled:.0} of {total_demand:.0} demanded units; \
         average closing stock {:.1}",
        trace.end_on_hand.iter().sum::<f64>() / trace.end_on_hand.len() as f64
    );
}
