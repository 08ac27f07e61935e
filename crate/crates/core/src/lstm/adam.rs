use serde::{Deserialize, Serialize};

use super::network::LstmParams;
use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first: LstmParams,
    pub second: LstmParams,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &LstmParams) -> Self {
        Self {
            first: LstmParams::zeros_like(params),
            second: LstmParams::zeros_like(params),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    params: &mut LstmParams,
    state: &mut AdamState,
    gradients: &LstmParams,
    learning_rate: f64,
) -> Result<()> {
    if !params.same_shape(gradients) || !params.same_shape(&state.first) {
        return Err(Error::InvalidInput("gradient shape does not match parameters".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - ADAM_BETA1.powi(t);
    let c2 = 1.0 - ADAM_BETA2.powi(t);
    let grads = gradients.slices();
    let firsts = state.first.slices_mut();
    let seconds = state.second.slices_mut();
    for (((p, g), m), v) in params.slices_mut().into_iter().zip(grads).zip(firsts).zip(seconds) {
        for i in 0..p.len() {
            m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g[i];
            v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
        }
    }
    Ok(())
}
