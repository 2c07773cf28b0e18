//! RMSprop.

use serde::{Deserialize, Serialize};

use super::TrainError;

/// Second-moment accumulator and step count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub v: Vec<f64>,
    pub step: u64,
}

impl OptimizerState {
    pub fn new(len: usize) -> Self {
        Self {
            v: vec![0.0; len],
            step: 0,
        }
    }
}

/// `v ← ρv + (1-ρ)g²`, `θ ← θ - lr·g/(√v + ε)`.
pub fn rmsprop_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut OptimizerState,
    lr: f64,
    rho: f64,
    eps: f64,
) -> Result<(), TrainError> {
    if params.len() != grads.len() || params.len() != state.v.len() {
        return Err(TrainError::ShapeMismatch {
            params: params.len(),
            grads: grads.len(),
            state: state.v.len(),
        });
    }
    for ((p, &g), v) in params.iter_mut().zip(grads).zip(state.v.iter_mut()) {
        *v = rho * *v + (1.0 - rho) * g * g;
        *p -= lr * g / (v.sqrt() + eps);
    }
    state.step += 1;
    Ok(())
}
