use crate::{Scalar, Tensor, TensorError};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 3e-5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First/second moment estimates for one parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamState<F> {
    pub m: Vec<F>,
    pub v: Vec<F>,
    pub step: u64,
}

impl<F: Scalar> AdamState<F> {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![F::zero(); len],
            v: vec![F::zero(); len],
            step: 0,
        }
    }
}

/// One Adam update with bias correction. The step counter is incremented
/// before the correction terms are computed. A non-finite gradient aborts
/// the update and names the offending parameter.
pub fn adam_step<F: Scalar>(
    param: &mut Tensor<F>,
    grad: &Tensor<F>,
    state: &mut AdamState<F>,
    cfg: &AdamConfig,
    name: &str,
) -> Result<(), TensorError> {
    if param.data.len() != grad.data.len() || param.data.len() != state.m.len() {
        return Err(TensorError::ShapeMismatch {
            op: "adam_step",
            expected: format!("{} elements", param.data.len()),
            got: format!("grad {}, state {}", grad.data.len(), state.m.len()),
        });
    }
    if !grad.is_finite() {
        return Err(TensorError::NonFiniteGrad {
            param: name.to_string(),
        });
    }
    state.step += 1;
    let b1 = F::of(cfg.beta1);
    let b2 = F::of(cfg.beta2);
    let one = F::one();
    let corr1 = F::of(1.0 - cfg.beta1.powi(state.step as i32));
    let corr2 = F::of(1.0 - cfg.beta2.powi(state.step as i32));
    let lr = F::of(cfg.lr);
    let eps = F::of(cfg.eps);
    for i in 0..param.data.len() {
        let g = grad.data[i];
        state.m[i] = b1 * state.m[i] + (one - b1) * g;
        state.v[i] = b2 * state.v[i] + (one - b2) * g * g;
        let m_hat = state.m[i] / corr1;
        let v_hat = state.v[i] / corr2;
        param.data[i] = param.data[i] - lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
