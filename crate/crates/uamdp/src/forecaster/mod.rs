//! Probabilistic one-step forecasters.
//!
//! Every forecaster maps `(features, hypothesis)` to a predictive
//! distribution over the next observation. The predictive density doubles as
//! the likelihood term in the belief update, which is what ties forecasting
//! to filtering. Forecaster parameters are frozen during control; all types
//! here are immutable and prediction is a pure function.

mod conjugate;
mod dist;
mod gp;
mod persistence;

pub use conjugate::{RegimeGaussianForecaster, ScalarGaussianBelief};
pub use dist::{DistError, DistKind, PredictiveDist, VARIANCE_FLOOR};
pub use gp::{GPModel, GpError, SquaredExponential, ThetaEncoding};
pub use persistence::persistence_forecast;

use crate::belief::LatentParam;

/// One-step predictive model conditioned on a latent-parameter hypothesis.
pub trait Forecaster {
    fn predict(&self, features: &[f64], theta: &LatentParam) -> PredictiveDist;

    /// Log-likelihood of the realized observation under each hypothesis,
    /// in hypothesis order. This is the vector fed to the belief update.
    fn log_likelihoods(
        &self,
        features: &[f64],
        hypotheses: &[LatentParam],
        observed: &[f64],
    ) -> Vec<f64> {
        hypotheses
            .iter()
            .map(|theta| {
                self.predict(features, theta)
                    .log_likelihood(observed)
                    .unwrap_or(f64::NEG_INFINITY)
            })
            .collect()
    }
}

/// GP forecaster: features are augmented with an encoding of the hypothesis
/// and pushed through one shared exact GP.
#[derive(Debug, Clone)]
pub struct GpForecaster {
    pub model: GPModel,
    pub encoding: ThetaEncoding,
}

impl Forecaster for GpForecaster {
    fn predict(&self, features: &[f64], theta: &LatentParam) -> PredictiveDist {
        let mut z = features.to_vec();
        z.extend(self.encoding.encode(theta));
        self.model
            .predict(&z)
            .expect("query dimension fixed by construction")
    }
}
