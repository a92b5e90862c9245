//! Probabilistic forecast scoring: interval coverage, PIT/KS uniformity,
//! both CRPS estimators, and how an overconfident or underconfident
//! forecaster shows up in each diagnostic.
//!
//!     cargo run --release --example forecast_calibration

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uamdp::forecaster::PredictiveDist;
use uamdp::metrics::{coverage, crps_empirical, crps_gaussian, pit_ks, ForecastRecord};

fn records(sigma_forecast: f64, n: usize, seed: u64) -> Vec<ForecastRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = PredictiveDist::scalar_gaussian(0.0, 1.0).unwrap();
    (0..n)
        .map(|_| {
            ForecastRecord::new(
                PredictiveDist::scalar_gaussian(0.0, sigma_forecast * sigma_forecast).unwrap(),
                truth.sample_with(&mut rng),
                1,
            )
            .unwrap()
        })
        .collect()
}

fn main() {
    let n = 10_000;
    println!("truth is N(0,1); forecasts vary only in spread (n = {n}):\n");
    println!(
        "  {:<14} {:>14} {:>12} {:>12}",
        "forecast sd", "80% coverage", "KS stat", "KS p-value"
    );
    for &sd in &[0.7, 1.0, 1.5] {
        let recs = records(sd, n, 11);
        let cov = coverage(&recs, 0.8).unwrap();
        let (ks, p) = pit_ks(&recs).unwrap();
        let label = match sd {
            s if s < 1.0 => "overconfident",
            s if s > 1.0 => "underconfident",
            _ => "well-specified",
        };
        println!("  {label:<14} {:>13.1}% {:>12.4} {:>12.4}", cov * 100.0, ks, p);
    }

    // The two CRPS estimators agree on matching inputs.
    let mu = 0.3;
    let sigma = 1.2;
    let y = 0.9;
    let closed = crps_gaussian(mu, sigma, y).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gaussian = PredictiveDist::scalar_gaussian(mu, sigma * sigma).unwrap();
    let samples: Vec<f64> = (0..20_000).map(|_| gaussian.sample_with(&mut rng)[0]).collect();
    let empirical = crps_empirical(&samples, y).unwrap();
    println!("\nCRPS of N({mu}, {sigma}²) against outcome {y}:");
    println!("  closed form {closed:.5}   sample estimator (M = 20k) {empirical:.5}");

    // Proper scoring: the matching forecast wins on average.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let truth = PredictiveDist::scalar_gaussian(0.0, 1.0).unwrap();
    let mut scores = [0.0f64; 3];
    let sds = [0.7, 1.0, 1.5];
    let trials = 20_000;
    for _ in 0..trials {
        let y = truth.sample_with(&mut rng)[0];
        for (score, &sd) in scores.iter_mut().zip(&sds) {
            *score += crps_gaussian(0.0, sd, y).unwrap() / trials as f64;
        }
    }
    println!("\nmean CRPS by forecast sd (lower is better):");
    for (&sd, &score) in sds.iter().zip(&scores) {
        println!("  sd {sd}: {score:.5}");
    }
    println!("the well-specified sd = 1.0 forecaster minimizes the proper score");
}
