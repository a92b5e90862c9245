//! Naive persistence baseline: tomorrow looks like today, with uncertainty
//! taken from recent history. Exists as a sanity floor for the metrics
//! harness, not as a serious forecaster.

use super::dist::{PredictiveDist, VARIANCE_FLOOR};

/// Predicts the last observation with per-dimension trailing sample variance
/// over `var_window` observations (n−1 denominator, floored).
///
/// Panics if `history` is empty or `var_window` is zero; both are caller
/// contract violations rather than runtime conditions.
pub fn persistence_forecast(history: &[Vec<f64>], var_window: usize) -> PredictiveDist {
    assert!(!history.is_empty(), "history must be non-empty");
    assert!(var_window >= 1, "var_window must be >= 1");
    let last = history.last().unwrap();
    let d = last.len();
    let start = history.len().saturating_sub(var_window);
    let window = &history[start..];
    let m = window.len() as f64;

    let mut variances = vec![VARIANCE_FLOOR; d];
    if window.len() > 1 {
        for (j, var) in variances.iter_mut().enumerate() {
            let mean = window.iter().map(|row| row[j]).sum::<f64>() / m;
            let ss = window.iter().map(|row| (row[j] - mean).powi(2)).sum::<f64>();
            *var = (ss / (m - 1.0)).max(VARIANCE_FLOOR);
        }
    }
    PredictiveDist::diagonal_gaussian(last.clone(), variances).expect("floored variances")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_history_pins_mean_and_floors_variance() {
        let history = vec![vec![2.5]; 6];
        let p = persistence_forecast(&history, 4);
        assert_relative_eq!(p.means()[0], 2.5);
        assert_relative_eq!(p.variances()[0], VARIANCE_FLOOR);
    }

    #[test]
    fn trailing_window_sample_variance() {
        let history = vec![vec![1.0], vec![2.0], vec![3.0]];
        let p = persistence_forecast(&history, 3);
        assert_relative_eq!(p.means()[0], 3.0);
        assert_relative_eq!(p.variances()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_element_history_degenerates_to_floor() {
        let p = persistence_forecast(&[vec![-0.7, 4.0]], 10);
        assert_eq!(p.means(), &[-0.7, 4.0]);
        assert_relative_eq!(p.variances()[0], VARIANCE_FLOOR);
        assert_relative_eq!(p.variances()[1], VARIANCE_FLOOR);
    }

    #[test]
    fn window_shorter_than_history_uses_the_tail() {
        let history = vec![vec![100.0], vec![1.0], vec![2.0], vec![3.0]];
        let p = persistence_forecast(&history, 3);
        // The 100.0 outlier sits outside the window.
        assert_relative_eq!(p.variances()[0], 1.0, epsilon = 1e-12);
    }
}
