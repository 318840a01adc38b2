//! Bias-corrected Adam.

use crate::error::{Result, SvanError};
use crate::tensor::Tensor4;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First/second moment accumulators, one pair per parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// Fresh state for the given parameter tensors (moments start at zero).
    pub fn new(params: &[&Tensor4]) -> Self {
        AdamState {
            m: params.iter().map(|p| vec![0.0; p.numel()]).collect(),
            v: params.iter().map(|p| vec![0.0; p.numel()]).collect(),
            step: 0,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            eps: ADAM_EPS,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One Adam update over a parameter list. `params`, `grads`, and the state
/// must all line up index-by-index and shape-by-shape.
pub fn adam_step(
    params: &mut [&mut Tensor4],
    grads: &[Tensor4],
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(SvanError::Gradient(format!(
            "adam_step: {} params, {} grads, state for {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.numel() != g.numel() {
            return Err(SvanError::ShapeMismatch {
                context: format!("adam_step param {i}"),
                left: p.shape().to_vec(),
                right: g.shape().to_vec(),
            });
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);

    for ((param, grad), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        for ((pv, &gv), (mv, vv)) in param
            .data_mut()
            .iter_mut()
            .zip(grad.data())
            .zip(m.iter_mut().zip(v.iter_mut()))
        {
            *mv = state.beta1 * *mv + (1.0 - state.beta1) * gv;
            *vv = state.beta2 * *vv + (1.0 - state.beta2) * gv * gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *pv -= lr * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut p = Tensor4::full(1, 1, 2, 2, 0.75);
        let before = p.clone();
        let g = Tensor4::zeros(1, 1, 2, 2);
        let mut state = AdamState::new(&[&p]);
        adam_step(&mut [&mut p], &[g], &mut state, 1e-3).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_moves_by_almost_lr() {
        // With g = 1: m_hat = v_hat = 1, so the update is -lr / (1 + eps).
        let lr = 0.37;
        let mut p = Tensor4::scalar(2.0);
        let g = Tensor4::scalar(1.0);
        let mut state = AdamState::new(&[&p]);
        adam_step(&mut [&mut p], &[g], &mut state, lr).unwrap();
        let delta = p.data()[0] - 2.0;
        assert!((delta + lr).abs() <= lr * ADAM_EPS);
    }

    #[test]
    fn matches_scalar_reference_for_two_steps() {
        // Straight-line reference implementation on scalars.
        let lr = 1e-2;
        let grads = [0.3f64, -0.8];
        let mut reference = 1.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for (i, g) in grads.iter().enumerate() {
            let t = (i + 1) as i32;
            m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g;
            v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = m / (1.0 - ADAM_BETA1.powi(t));
            let v_hat = v / (1.0 - ADAM_BETA2.powi(t));
            reference -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }

        let mut p = Tensor4::scalar(1.0);
        let mut state = AdamState::new(&[&p]);
        for g in grads {
            adam_step(&mut [&mut p], &[Tensor4::scalar(g)], &mut state, lr).unwrap();
        }
        assert!((p.data()[0] - reference).abs() < 1e-12);
        assert_eq!(state.step_count(), 2);
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let mut p = Tensor4::zeros(1, 1, 2, 2);
        let g = Tensor4::zeros(1, 1, 1, 2);
        let mut state = AdamState::new(&[&p]);
        assert!(adam_step(&mut [&mut p], &[g], &mut state, 1e-3).is_err());
    }
}
