//! Exact Gaussian-process regression with a squared-exponential kernel.
//!
//! The model is fit once from a training table (no hyperparameter learning;
//! parameters are frozen before control starts) and then queried as a pure
//! function. Each output dimension gets its own noise level and constant
//! mean; the kernel is shared. Latent-parameter hypotheses enter through an
//! encoding appended to the feature vector, so one model covers the whole
//! hypothesis set.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use super::dist::PredictiveDist;
use crate::belief::LatentParam;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("inputs and targets have different row counts ({inputs} vs {targets})")]
    RowMismatch { inputs: usize, targets: usize },
    #[error("length-scales must all be positive")]
    BadLengthScale,
    #[error("output variance must be positive")]
    BadOutputVariance,
    #[error("noise variance must be positive for every output")]
    BadNoiseVariance,
    #[error("query has dimension {got}, training inputs have {expected}")]
    QueryDimension { got: usize, expected: usize },
    #[error("kernel Gram matrix is not positive definite even with jitter {max_jitter:e}")]
    IllConditioned { max_jitter: f64 },
    #[error("training table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Squared-exponential kernel with per-dimension length-scales.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquaredExponential {
    pub length_scales: Vec<f64>,
    pub output_variance: f64,
}

impl SquaredExponential {
    pub fn isotropic(length_scale: f64, output_variance: f64, dim: usize) -> Self {
        Self {
            length_scales: vec![length_scale; dim],
            output_variance,
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sq = 0.0;
        for ((&x, &y), &ell) in a.iter().zip(b).zip(&self.length_scales) {
            let d = (x - y) / ell;
            sq += d * d;
        }
        self.output_variance * (-0.5 * sq).exp()
    }
}

/// Encoding of a latent-parameter hypothesis into GP input coordinates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum ThetaEncoding {
    /// Raw parameter vector appended as-is (continuous hypotheses).
    Identity,
    /// One-hot over a finite hypothesis set, keyed by `LatentParam::id`.
    OneHot { n_hypotheses: usize },
}

impl ThetaEncoding {
    pub fn encode(&self, theta: &LatentParam) -> Vec<f64> {
        match *self {
            ThetaEncoding::Identity => theta.params.clone(),
            ThetaEncoding::OneHot { n_hypotheses } => {
                let mut v = vec![0.0; n_hypotheses];
                if theta.id < n_hypotheses {
                    v[theta.id] = 1.0;
                }
                v
            }
        }
    }
}

/// Exact GP regressor with cached Cholesky factors, one per output.
#[derive(Debug, Clone)]
pub struct GPModel {
    inputs: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    kernel: SquaredExponential,
    noise_variance: Vec<f64>,
    mean_fn: Vec<f64>,
    factors: Vec<OutputFactor>,
}

#[derive(Debug, Clone)]
struct OutputFactor {
    chol: Option<Cholesky<f64, Dyn>>,
    alpha: DVector<f64>,
}

impl GPModel {
    /// Fits the exact posterior factors. `targets[i]` holds the d output
    /// values for training row `i`.
    pub fn fit(
        inputs: Vec<Vec<f64>>,
        targets: Vec<Vec<f64>>,
        kernel: SquaredExponential,
        noise_variance: Vec<f64>,
        mean_fn: Vec<f64>,
    ) -> Result<Self, GpError> {
        if inputs.len() != targets.len() {
            return Err(GpError::RowMismatch {
                inputs: inputs.len(),
                targets: targets.len(),
            });
        }
        if kernel.length_scales.iter().any(|&l| l <= 0.0 || l.is_nan()) {
            return Err(GpError::BadLengthScale);
        }
        if kernel.output_variance <= 0.0 || kernel.output_variance.is_nan() {
            return Err(GpError::BadOutputVariance);
        }
        if noise_variance.len() != mean_fn.len()
            || noise_variance.iter().any(|&v| v <= 0.0 || v.is_nan())
        {
            return Err(GpError::BadNoiseVariance);
        }

        let n = inputs.len();
        let d = mean_fn.len();
        let mut factors = Vec::with_capacity(d);
        if n == 0 {
            for _ in 0..d {
                factors.push(OutputFactor {
                    chol: None,
                    alpha: DVector::zeros(0),
                });
            }
            return Ok(Self {
                inputs,
                targets,
                kernel,
                noise_variance,
                mean_fn,
                factors,
            });
        }

        let mut gram = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let k = kernel.eval(&inputs[i], &inputs[j]);
                gram[(i, j)] = k;
                gram[(j, i)] = k;
            }
        }
        for j in 0..d {
            let chol = factor_with_jitter(&gram, noise_variance[j], kernel.output_variance)?;
            let centered =
                DVector::from_iterator(n, targets.iter().map(|row| row[j] - mean_fn[j]));
            let alpha = chol.solve(&centered);
            factors.push(OutputFactor {
                chol: Some(chol),
                alpha,
            });
        }
        Ok(Self {
            inputs,
            targets,
            kernel,
            noise_variance,
            mean_fn,
            factors,
        })
    }

    /// Loads a training table from CSV with header columns `z_1..z_p` then
    /// `y_1..y_d` and fits the model.
    pub fn fit_from_csv<P: AsRef<Path>>(
        path: P,
        kernel: SquaredExponential,
        noise_variance: Vec<f64>,
        mean_fn: Vec<f64>,
    ) -> Result<Self, GpError> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let z_cols: Vec<usize> = headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with("z_"))
            .map(|(i, _)| i)
            .collect();
        let y_cols: Vec<usize> = headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with("y_"))
            .map(|(i, _)| i)
            .collect();
        if z_cols.is_empty() || y_cols.is_empty() {
            return Err(GpError::Table(
                "expected header columns z_1..z_p and y_1..y_d".into(),
            ));
        }
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64, GpError> {
                record
                    .get(i)
                    .ok_or_else(|| GpError::Table("short row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| GpError::Table(format!("bad number: {e}")))
            };
            inputs.push(z_cols.iter().map(|&i| parse(i)).collect::<Result<_, _>>()?);
            targets.push(y_cols.iter().map(|&i| parse(i)).collect::<Result<_, _>>()?);
        }
        Self::fit(inputs, targets, kernel, noise_variance, mean_fn)
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(self.kernel.length_scales.len(), Vec::len)
    }

    pub fn output_dim(&self) -> usize {
        self.mean_fn.len()
    }

    pub fn n_training_rows(&self) -> usize {
        self.inputs.len()
    }

    pub fn training_inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn training_targets(&self) -> &[Vec<f64>] {
        &self.targets
    }

    /// Posterior predictive at a query point: per-output Gaussian with the
    /// exact GP mean and variance, observation noise included.
    ///
    /// With no training rows this is the prior: `(mean_fn, σ_f² + σ_ε²)`.
    pub fn predict(&self, z: &[f64]) -> Result<PredictiveDist, GpError> {
        if !self.inputs.is_empty() && z.len() != self.inputs[0].len() {
            return Err(GpError::QueryDimension {
                got: z.len(),
                expected: self.inputs[0].len(),
            });
        }
        let d = self.output_dim();
        let prior_var = self.kernel.output_variance;
        if self.inputs.is_empty() {
            let variances = self
                .noise_variance
                .iter()
                .map(|&nv| prior_var + nv)
                .collect();
            return Ok(PredictiveDist::diagonal_gaussian(self.mean_fn.clone(), variances)
                .expect("prior variances are positive"));
        }

        let n = self.inputs.len();
        let k_star = DVector::from_iterator(
            n,
            self.inputs.iter().map(|row| self.kernel.eval(row, z)),
        );
        let mut means = Vec::with_capacity(d);
        let mut variances = Vec::with_capacity(d);
        for j in 0..d {
            let factor = &self.factors[j];
            let chol = factor.chol.as_ref().expect("fitted with training rows");
            let mean = self.mean_fn[j] + k_star.dot(&factor.alpha);
            let v = chol.solve(&k_star);
            let reduction = k_star.dot(&v);
            // Latent variance can round slightly negative at duplicated inputs.
            let latent = (prior_var - reduction).max(0.0);
            means.push(mean);
            variances.push(latent + self.noise_variance[j]);
        }
        Ok(PredictiveDist::diagonal_gaussian(means, variances)
            .expect("noise keeps variances positive"))
    }
}

/// Cholesky with escalating diagonal jitter: starts at `1e-10 · σ_f²` and
/// multiplies by 10 until the factorization succeeds or the jitter passes
/// `1e-4`, at which point the Gram matrix is declared ill-conditioned.
fn factor_with_jitter(
    gram: &DMatrix<f64>,
    noise: f64,
    output_variance: f64,
) -> Result<Cholesky<f64, Dyn>, GpError> {
    let n = gram.nrows();
    let base = {
        let mut m = gram.clone();
        for i in 0..n {
            m[(i, i)] += noise;
        }
        m
    };
    if let Some(c) = Cholesky::new(base.clone()) {
        return Ok(c);
    }
    let mut jitter = 1e-10 * output_variance;
    while jitter <= 1e-4 {
        let mut m = base.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(m) {
            return Ok(c);
        }
        jitter *= 10.0;
    }
    Err(GpError::IllConditioned { max_jitter: 1e-4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_kernel(dim: usize) -> SquaredExponential {
        SquaredExponential::isotropic(1.0, 1.0, dim)
    }

    #[test]
    fn empty_training_set_returns_the_prior() {
        let m = GPModel::fit(vec![], vec![], unit_kernel(2), vec![0.1], vec![0.5]).unwrap();
        let p = m.predict(&[0.3, -0.7]).unwrap();
        assert_relative_eq!(p.means()[0], 0.5);
        assert_relative_eq!(p.variances()[0], 1.1);
    }

    #[test]
    fn single_point_posterior_matches_hand_calculation() {
        // k(z0,z0)=σ_f²=1, σ_ε²=0.1, query at z0:
        // mean = m + (1/1.1)(y0 − m), var = 1 − 1/1.1 + 0.1
        let m = GPModel::fit(
            vec![vec![0.0]],
            vec![vec![2.0]],
            unit_kernel(1),
            vec![0.1],
            vec![0.5],
        )
        .unwrap();
        let p = m.predict(&[0.0]).unwrap();
        assert_relative_eq!(p.means()[0], 0.5 + (2.0 - 0.5) / 1.1, epsilon = 1e-12);
        assert_relative_eq!(p.variances()[0], 1.0 - 1.0 / 1.1 + 0.1, epsilon = 1e-12);
    }

    #[test]
    fn far_query_reverts_to_the_prior() {
        let m = GPModel::fit(
            vec![vec![0.0], vec![1.0]],
            vec![vec![3.0], vec![-1.0]],
            unit_kernel(1),
            vec![0.1],
            vec![0.25],
        )
        .unwrap();
        let p = m.predict(&[50.0]).unwrap();
        assert!((p.means()[0] - 0.25).abs() < 1e-6);
        assert!((p.variances()[0] - 1.1).abs() < 1e-6);
    }

    #[test]
    fn near_noiseless_duplicate_recovers_the_target() {
        let m = GPModel::fit(
            vec![vec![0.4], vec![1.3]],
            vec![vec![1.7], vec![-0.2]],
            unit_kernel(1),
            vec![1e-12],
            vec![0.0],
        )
        .unwrap();
        let p = m.predict(&[0.4]).unwrap();
        assert!((p.means()[0] - 1.7).abs() < 1e-6, "mean {}", p.means()[0]);
    }

    #[test]
    fn predictive_variance_shrinks_as_training_grows() {
        let query = vec![0.5];
        let mut previous = f64::INFINITY;
        for n in 0..6 {
            let inputs: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * 0.3]).collect();
            let targets: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64).sin()]).collect();
            let m = GPModel::fit(inputs, targets, unit_kernel(1), vec![0.05], vec![0.0]).unwrap();
            let var = m.predict(&query).unwrap().variances()[0];
            assert!(
                var <= previous + 1e-9,
                "variance rose from {previous} to {var} at n={n}"
            );
            previous = var;
        }
    }

    #[test]
    fn duplicated_rows_trigger_jitter_rather_than_failure() {
        // Identical inputs with near-zero noise make the plain Gram singular.
        let m = GPModel::fit(
            vec![vec![1.0], vec![1.0], vec![1.0]],
            vec![vec![0.5], vec![0.5], vec![0.5]],
            unit_kernel(1),
            vec![1e-15],
            vec![0.0],
        );
        let m = m.expect("jitter escalation should rescue duplicated inputs");
        let p = m.predict(&[1.0]).unwrap();
        assert!((p.means()[0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn theta_encodings() {
        let theta = LatentParam::new(1, vec![0.3, -0.1]);
        assert_eq!(ThetaEncoding::Identity.encode(&theta), vec![0.3, -0.1]);
        assert_eq!(
            ThetaEncoding::OneHot { n_hypotheses: 3 }.encode(&theta),
            vec![0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.csv");
        std::fs::write(&path, "z_1,z_2,y_1\n0.0,1.0,2.0\n1.0,0.0,-1.0\n").unwrap();
        let m = GPModel::fit_from_csv(&path, unit_kernel(2), vec![0.1], vec![0.0]).unwrap();
        assert_eq!(m.n_training_rows(), 2);
        assert_eq!(m.input_dim(), 2);
        let p = m.predict(&[0.0, 1.0]).unwrap();
        assert!(p.means()[0] > 0.5, "should pull toward the nearby +2 target");
    }

    #[test]
    fn query_dimension_is_checked() {
        let m = GPModel::fit(
            vec![vec![0.0, 0.0]],
            vec![vec![1.0]],
            unit_kernel(2),
            vec![0.1],
            vec![0.0],
        )
        .unwrap();
        assert!(matches!(
            m.predict(&[1.0]),
            Err(GpError::QueryDimension { got: 1, expected: 2 })
        ));
    }
}
