use std::f64::consts::PI;

use super::state_space::StateSpace;
use crate::error::{Error, Result};

/// Kalman filter pass at unit innovation variance.
///
/// Prediction-error variances scale linearly with `sigma2`, so one pass
/// serves every variance; [`FilterOutput::loglik`] applies it afterwards.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    /// One-step prediction errors `v_t = w_t - ŵ_{t|t-1}`.
    pub innovations: Vec<f64>,
    /// Prediction-error variances divided by `sigma2`.
    pub variances: Vec<f64>,
    /// Predicted state for the step after the last observation.
    pub next_state: Vec<f64>,
    sum_log_var: f64,
    sum_sq: f64,
}

impl FilterOutput {
    pub fn len(&self) -> usize {
        self.innovations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.innovations.is_empty()
    }

    /// Exact Gaussian log-likelihood at innovation variance `sigma2`.
    pub fn loglik(&self, sigma2: f64) -> f64 {
        let n = self.len() as f64;
        -0.5 * (n * (2.0 * PI).ln() + n * sigma2.ln() + self.sum_log_var + self.sum_sq / sigma2)
    }

    /// Variance that maximizes the likelihood for these innovations.
    pub fn sigma2_mle(&self) -> f64 {
        self.sum_sq / self.len() as f64
    }

    /// Log-likelihood with `sigma2` profiled out.
    pub fn concentrated_loglik(&self) -> f64 {
        self.loglik(self.sigma2_mle())
    }
}

/// Runs the filter from the stationary initial state.
pub fn filter(system: &StateSpace, observations: &[f64]) -> Result<FilterOutput> {
    let r = system.dim();
    let ar = &system.ar;
    let loading = &system.loading;
    let p0 = system.stationary_covariance()?;

    // Row-major dense covariance; T is sparse so products are O(r²).
    let mut p = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..r {
            p[i * r + j] = p0[(i, j)];
        }
    }
    let mut a = vec![0.0; r];
    let mut tp = vec![0.0; r * r];
    let mut gain = vec![0.0; r];

    let mut innovations = Vec::with_capacity(observations.len());
    let mut variances = Vec::with_capacity(observations.len());
    let mut sum_log_var = 0.0;
    let mut sum_sq = 0.0;

    for (t, &y) in observations.iter().enumerate() {
        if !y.is_finite() {
            return Err(Error::InvalidInput(format!("observation {t} is not finite")));
        }
        let v = y - a[0];
        let f = p[0];
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::Numerical(format!(
                "prediction variance {f} at step {t}"
            )));
        }
        innovations.push(v);
        variances.push(f);
        sum_log_var += f.ln();
        sum_sq += v * v / f;

        // TP = T·P: row i is ar_i·P[0,:] + P[i+1,:].
        for i in 0..r {
            for j in 0..r {
                let below = if i + 1 < r { p[(i + 1) * r + j] } else { 0.0 };
                tp[i * r + j] = ar[i] * p[j] + below;
            }
        }
        for i in 0..r {
            gain[i] = tp[i * r] / f;
        }
        // a ← T a + K v
        let a0 = a[0];
        for i in 0..r {
            let below = if i + 1 < r { a[i + 1] } else { 0.0 };
            a[i] = ar[i] * a0 + below + gain[i] * v;
        }
        // P ← (T P) Tᵀ + R Rᵀ − K Kᵀ F
        for i in 0..r {
            for j in i..r {
                let right = if j + 1 < r { tp[i * r + j + 1] } else { 0.0 };
                let val = ar[j] * tp[i * r] + right + loading[i] * loading[j]
                    - gain[i] * gain[j] * f;
                p[i * r + j] = val;
                p[j * r + i] = val;
            }
        }
    }

    Ok(FilterOutput {
        innovations,
        variances,
        next_state: a,
        sum_log_var,
        sum_sq,
    })
}

/// Exact Gaussian log-likelihood of `observations` under `system`.
pub fn kalman_loglik(system: &StateSpace, observations: &[f64]) -> Result<f64> {
    let out = filter(system, observations)?;
    let ll = out.loglik(system.sigma2);
    if !ll.is_finite() {
        return Err(Error::Numerical("log-likelihood is not finite".into()));
    }
    Ok(ll)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_logpdf(x: f64, var: f64) -> f64 {
        -0.5 * ((2.0 * PI * var).ln() + x * x / var)
    }

    #[test]
    fn white_noise_matches_iid_density() {
        let ss = StateSpace::from_arma(&[], &[], 2.5);
        let y = [0.3, -1.2, 2.0, 0.0, 0.7];
        let expected: f64 = y.iter().map(|&v| normal_logpdf(v, 2.5)).sum();
        assert!((kalman_loglik(&ss, &y).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn ar1_factorization() {
        // p(y1) p(y2|y1) ... with y1 ~ N(0, σ²/(1-φ²)), y_t|y_{t-1} ~ N(φ y_{t-1}, σ²).
        let (phi, s2) = (0.7, 1.3);
        let ss = StateSpace::from_arma(&[phi], &[], s2);
        let y = [0.5, 1.1, -0.4, 0.9];
        let mut expected = normal_logpdf(y[0], s2 / (1.0 - phi * phi));
        for t in 1..y.len() {
            expected += normal_logpdf(y[t] - phi * y[t - 1], s2);
        }
        assert!((kalman_loglik(&ss, &y).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn concentrated_variance_maximizes() {
        let ss = StateSpace::from_arma(&[0.4], &[0.2], 1.0);
        let y = [0.5, 1.1, -0.4, 0.9, 2.0, -1.0];
        let out = filter(&ss, &y).unwrap();
        let best = out.concentrated_loglik();
        let s2 = out.sigma2_mle();
        assert!(best >= out.loglik(s2 * 1.1));
        assert!(best >= out.loglik(s2 * 0.9));
    }

    #[test]
    fn rejects_non_finite_observation() {
        let ss = StateSpace::from_arma(&[0.4], &[], 1.0);
        assert!(kalman_loglik(&ss, &[1.0, f64::NAN]).is_err());
    }
}
