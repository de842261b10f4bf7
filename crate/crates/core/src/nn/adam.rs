use alloc::vec::Vec;

use crate::{Error, Real, Result, Tensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            alpha: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamHyper {
    pub fn validate(&self) -> Result<()> {
        let beta_ok = |b: f64| (0.0..1.0).contains(&b);
        // alpha = 0 is allowed: it freezes parameters, which training tests rely on
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::ConfigInvalid("adam alpha must be finite and non-negative"));
        }
        if !beta_ok(self.beta1) || !beta_ok(self.beta2) {
            return Err(Error::ConfigInvalid("adam betas must lie in [0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::ConfigInvalid("adam epsilon must be positive"));
        }
        Ok(())
    }
}

/// First and second moment estimates, one tensor per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T = f32> {
    pub m: Vec<Tensor<T>>,
    pub v: Vec<Tensor<T>>,
    pub t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new<'a>(params: impl IntoIterator<Item = &'a Tensor<T>>) -> Self {
        let m: Vec<Tensor<T>> = params.into_iter().map(|p| Tensor::zeros(p.shape())).collect();
        AdamState {
            v: m.clone(),
            m,
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of every parameter tensor.
pub fn adam_step<T: Real>(
    params: &mut [&mut Tensor<T>],
    grads: &[&Tensor<T>],
    state: &mut AdamState<T>,
    hyper: &AdamHyper,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() || params.len() != state.v.len() {
        return Err(Error::ShapeMismatch("adam parameter count"));
    }
    for (((p, g), m), v) in params.iter().zip(grads).zip(&state.m).zip(&state.v) {
        if p.shape() != g.shape() || p.shape() != m.shape() || p.shape() != v.shape() {
            return Err(Error::ShapeMismatch("adam tensor shapes"));
        }
    }

    state.t += 1;
    let t = state.t as i32;
    let b1 = T::from_f64(hyper.beta1);
    let b2 = T::from_f64(hyper.beta2);
    let alpha = T::from_f64(hyper.alpha);
    let eps = T::from_f64(hyper.epsilon);
    let bc1 = T::ONE - b1.powi(t);
    let bc2 = T::ONE - b2.powi(t);

    for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        let (ps, gs) = (p.data_mut(), g.data());
        for (((pv, &gv), mv), vv) in ps.iter_mut().zip(gs).zip(m.data_mut()).zip(v.data_mut()) {
            *mv = b1 * *mv + (T::ONE - b1) * gv;
            *vv = b2 * *vv + (T::ONE - b2) * gv * gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *pv -= alpha * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
