//! The two-step walkthrough: pinned prices (100 → 102 → 101.5), pinned
//! hypothesis draws (+0.9%, +0.5%), conjugate posterior updates, and the
//! planner choosing among the 20/50/80% equity stances under the blended
//! CVaR objective.
//!
//!     cargo run --release --example demo_walkthrough

use uamdp::harness::{run_demo, RunConfig};

fn main() {
    let report = run_demo(&RunConfig::default(), 0).expect("demo scenario runs");

    println!("  t  price    r_t       posterior mean  posterior var  action  equity");
    for row in &report.rows {
        println!(
            "  {}  {:<7} {:<9} {:<15.6} {:<14.3e} {:<7} {:.0}%",
            row.t,
            row.price,
            row.realized_return.map_or("-".into(), |r| format!("{r:+.4}")),
            row.mu,
            row.sigma_sq,
            row.action,
            row.equity_weight * 100.0,
        );
    }
    println!();
    println!(
        "final value: {:.1} per 100 invested (${:.0} on the $1,000 narrative)",
        report.final_value, report.final_value_dollars
    );
    println!(
        "ride-the-50/50 comparison: {:.2} (the switch to 80% equity adds {:+.2} points)",
        report.buy_hold_value,
        report.final_value - report.buy_hold_value
    );
    println!(
        "posterior variance contracted {:.1e} → {:.1e} → {:.1e} as returns arrived",
        report.rows[0].sigma_sq, report.rows[1].sigma_sq, report.rows[2].sigma_sq
    );
}
