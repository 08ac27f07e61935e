//! Bijection between unconstrained reals and stationary AR coefficients,
//! through partial autocorrelations in (-1, 1).

use crate::error::{Error, Result};

/// Maps unconstrained values to coefficients `φ` of a stationary
/// `1 - Σ φ_i B^i`. Each input becomes a partial autocorrelation
/// `x / sqrt(1 + x²)`, which Durbin-Levinson turns into AR coefficients.
pub fn constrain_stationary(unconstrained: &[f64]) -> Vec<f64> {
    let partial: Vec<f64> = unconstrained
        .iter()
        .map(|&x| x / (1.0 + x * x).sqrt())
        .collect();
    let mut phi: Vec<f64> = Vec::with_capacity(partial.len());
    for (k, &r) in partial.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi.push(r);
    }
    phi
}

/// Inverse of [`constrain_stationary`].
pub fn unconstrain_stationary(coefficients: &[f64]) -> Result<Vec<f64>> {
    let mut phi = coefficients.to_vec();
    let mut partial = vec![0.0; phi.len()];
    for k in (0..phi.len()).rev() {
        let r = phi[k];
        if r.is_nan() || r.abs() >= 1.0 {
            return Err(Error::ConstraintViolation(format!(
                "coefficients {coefficients:?} are not stationary (partial autocorrelation {r})"
            )));
        }
        partial[k] = r;
        let denom = 1.0 - r * r;
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = (prev[j] + r * prev[k - 1 - j]) / denom;
        }
        phi.truncate(k);
    }
    Ok(partial.iter().map(|&r| r / (1.0 - r * r).sqrt()).collect())
}
