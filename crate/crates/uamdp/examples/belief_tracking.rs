//! Belief mechanics on a noisy regime stream: likelihood updates, entropy
//! collapse, effective sample size, systematic resampling, and Thompson
//! draws.
//!
//!     cargo run --release --example belief_tracking

use uamdp::belief::{Belief, LatentParam, ParticleFilterConfig};
use uamdp::forecaster::PredictiveDist;

fn main() {
    // Three drift hypotheses over a scalar observation stream.
    let hypotheses = vec![
        LatentParam::new(0, vec![-0.05]),
        LatentParam::new(1, vec![0.0]),
        LatentParam::new(2, vec![0.05]),
    ];
    let mut belief = Belief::uniform(hypotheses.clone()).unwrap();
    println!("prior entropy: {:.4} nats (uniform over 3)", belief.entropy());

    // The truth drifts at +0.05; observations are noisy.
    let truth = PredictiveDist::scalar_gaussian(0.05, 0.02f64.powi(2)).unwrap();
    for step in 0..12 {
        let observation = truth.sample_next(100 + step);
        let likelihoods: Vec<f64> = hypotheses
            .iter()
            .map(|h| {
                PredictiveDist::scalar_gaussian(h.params[0], 0.02f64.powi(2))
                    .unwrap()
                    .log_likelihood(&observation)
                    .unwrap()
                    .exp()
            })
            .collect();
        belief = belief.bayes_update(&likelihoods).unwrap();
        println!(
            "step {:>2}: obs {:+.4}  weights [{:.3}, {:.3}, {:.3}]  entropy {:.4}  ESS {:.2}",
            step,
            observation[0],
            belief.weights()[0],
            belief.weights()[1],
            belief.weights()[2],
            belief.entropy(),
            belief.effective_sample_size(),
        );
    }

    // Thompson draws follow the posterior mass.
    let draws = 1000;
    let hits = (0..draws).filter(|&s| belief.thompson_sample(s).id == 2).count();
    println!(
        "\nThompson draws matching the true hypothesis: {}/{draws} (posterior weight {:.3})",
        hits,
        belief.weights()[2]
    );

    // Systematic resampling to a 12-particle cloud with uniform weights.
    let cloud = belief.resample(&ParticleFilterConfig {
        n_particles: 12,
        resample_threshold: 0.5,
        rng_seed: 7,
    });
    let ids: Vec<usize> = cloud.hypotheses().iter().map(|h| h.id).collect();
    println!("systematic resample to 12 particles: ids {ids:?}");
    println!("post-resample ESS: {:.1} (uniform weights)", cloud.effective_sample_size());
}
