//! Exact GP regression as a hypothesis-conditioned forecaster: fit one GP
//! on inputs augmented with a one-hot hypothesis encoding, then watch the
//! predictive density separate the hypotheses and drive a belief update.
//!
//!     cargo run --release --example gp_forecasting

use uamdp::belief::{Belief, LatentParam};
use uamdp::forecaster::{
    Forecaster, GPModel, GpForecaster, SquaredExponential, ThetaEncoding,
};

fn main() {
    // Two regimes generate opposite responses to the same feature.
    let up = LatentParam::new(0, vec![]);
    let down = LatentParam::new(1, vec![]);
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for i in 0..24 {
        let x = -1.0 + i as f64 / 12.0;
        inputs.push(vec![x, 1.0, 0.0]);
        targets.push(vec![(2.0 * x).sin() * 0.5 + 0.3]);
        inputs.push(vec![x, 0.0, 1.0]);
        targets.push(vec![(2.0 * x).sin() * 0.5 - 0.3]);
    }
    let model = GPModel::fit(
        inputs,
        targets,
        SquaredExponential::isotropic(0.8, 0.5, 3),
        vec![1e-3],
        vec![0.0],
    )
    .expect("well-conditioned training set");
    println!(
        "fitted exact GP on {} rows ({} inputs incl. one-hot hypothesis channels)",
        model.n_training_rows(),
        model.input_dim()
    );

    let forecaster = GpForecaster { model, encoding: ThetaEncoding::OneHot { n_hypotheses: 2 } };
    println!("\nposterior predictive at a few query features:");
    for &x in &[-0.75, 0.0, 0.6] {
        let pu = forecaster.predict(&[x], &up);
        let pd = forecaster.predict(&[x], &down);
        println!(
            "  x = {x:+.2}: up-regime N({:+.3}, {:.4})   down-regime N({:+.3}, {:.4})",
            pu.means()[0],
            pu.variances()[0],
            pd.means()[0],
            pd.variances()[0]
        );
    }

    // Far from the data the posterior reverts to the prior.
    let far = forecaster.predict(&[40.0], &up);
    println!(
        "\nfar query reverts to the prior: mean {:+.4}, variance {:.4} (prior 0.5 + noise 1e-3)",
        far.means()[0],
        far.variances()[0]
    );

    // The predictive density is the likelihood the belief update consumes.
    let belief = Belief::uniform(vec![up.clone(), down.clone()]).unwrap();
    let observed = vec![0.75]; // clearly the up-regime's territory at x = 0.6
    let log_liks = forecaster.log_likelihoods(&[0.6], &[up, down], &observed);
    let posterior = belief.bayes_update_log(&log_liks).unwrap();
    println!(
        "\nafter observing {:+.2} at x = 0.6 the belief moves to [{:.3}, {:.3}]",
        observed[0],
        posterior.weights()[0],
        posterior.weights()[1]
    );
}
