use nalgebra::{DMatrix, DVector};

use super::polynomial::{expand_ar, expand_ma, SarimaParams, SarimaSpec};
use crate::error::{Error, Result};

/// Harvey-form state space of an ARMA(p*, q*) process:
///
/// ```text
/// x[t+1] = T x[t] + R e[t],   e[t] ~ N(0, sigma2)
/// w[t]   = x[t][0]
/// ```
///
/// `T` has the AR coefficients in its first column and ones on the
/// superdiagonal; `R = [1, b_1, ..., b_{r-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    /// First column of `T`, zero-padded to the state dimension.
    pub ar: Vec<f64>,
    /// Innovation loading `R`.
    pub loading: Vec<f64>,
    pub sigma2: f64,
}

impl StateSpace {
    /// Builds the system from expanded lag coefficients without checking
    /// stability.
    pub fn from_arma(ar: &[f64], ma: &[f64], sigma2: f64) -> Self {
        let dim = ar.len().max(ma.len() + 1).max(1);
        let mut first_col = vec![0.0; dim];
        first_col[..ar.len()].copy_from_slice(ar);
        let mut loading = vec![0.0; dim];
        loading[0] = 1.0;
        loading[1..=ma.len()].copy_from_slice(ma);
        Self {
            ar: first_col,
            loading,
            sigma2,
        }
    }

    pub fn dim(&self) -> usize {
        self.ar.len()
    }

    pub fn transition_matrix(&self) -> DMatrix<f64> {
        let r = self.dim();
        DMatrix::from_fn(r, r, |i, j| {
            if j == 0 {
                self.ar[i]
            } else if j == i + 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Stationary state covariance for unit innovation variance, solving
    /// `P = T P Tᵀ + R Rᵀ` via its vectorized linear system.
    pub fn stationary_covariance(&self) -> Result<DMatrix<f64>> {
        let r = self.dim();
        let t = self.transition_matrix();
        let rr = DVector::from_column_slice(&self.loading);
        let q = &rr * rr.transpose();
        let n = r * r;
        // vec(P) - (T ⊗ T) vec(P) = vec(Q), column-major vec.
        let kron = t.kronecker(&t);
        let system = DMatrix::<f64>::identity(n, n) - kron;
        let rhs = DVector::from_column_slice(q.as_slice());
        let solution = system
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Lyapunov system".into()))?;
        let p = DMatrix::from_column_slice(r, r, solution.as_slice());
        let p = (&p + p.transpose()) * 0.5;
        if p.iter().any(|v| !v.is_finite()) || p[(0, 0)] <= 0.0 {
            return Err(Error::Numerical(
                "initial state covariance is not positive".into(),
            ));
        }
        Ok(p)
    }
}

fn max_inverse_root(coeffs: &[f64]) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let p = coeffs.len();
    let companion = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            coeffs[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// True when `1 - Σ c_i B^i` has every root outside the unit circle.
pub(crate) fn is_stable(coeffs: &[f64]) -> bool {
    coeffs.iter().all(|c| c.is_finite()) && max_inverse_root(coeffs) < 1.0
}

/// Validates stationarity and invertibility, then builds the state space of
/// the expanded multiplicative ARMA.
pub fn to_state_space(spec: &SarimaSpec, params: &SarimaParams) -> Result<StateSpace> {
    params.check_dims(spec)?;
    if !(params.sigma2 > 0.0 && params.sigma2.is_finite()) {
        return Err(Error::ConstraintViolation(format!(
            "sigma2 must be positive, got {}",
            params.sigma2
        )));
    }
    let negated = |c: &[f64]| c.iter().map(|x| -x).collect::<Vec<_>>();
    let checks = [
        ("ar", params.ar.clone()),
        ("seasonal_ar", params.seasonal_ar.clone()),
        ("ma", negated(&params.ma)),
        ("seasonal_ma", negated(&params.seasonal_ma)),
    ];
    for (name, coeffs) in checks {
        if !is_stable(&coeffs) {
            let kind = if name.ends_with("ar") {
                "non-stationary"
            } else {
                "non-invertible"
            };
            return Err(Error::ConstraintViolation(format!(
                "{kind} {name} polynomial"
            )));
        }
    }
    Ok(StateSpace::from_arma(
        &expand_ar(spec, params),
        &expand_ma(spec, params),
        params.sigma2,
    ))
}
