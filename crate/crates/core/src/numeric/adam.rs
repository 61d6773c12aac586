//! Adam optimizer over a [`ParamStore`].

use crate::error::{Error, Result};
use crate::numeric::store::ParamStore;
use crate::numeric::tensor::Tensor;

/// Bias-corrected Adam state: one pair of moment tensors per parameter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Tensor>,
    v: Vec<Tensor>,
    step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(store: &ParamStore, lr: f64) -> Self {
        let shapes: Vec<Vec<usize>> = store
            .names()
            .iter()
            .map(|n| store.get(n).shape().to_vec())
            .collect();
        Self {
            m: shapes.iter().cloned().map(Tensor::zeros).collect(),
            v: shapes.into_iter().map(Tensor::zeros).collect(),
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update from the store's accumulated gradients;
    /// gradients are zeroed afterwards. A NaN gradient aborts with the
    /// offending parameter named.
    pub fn update(&mut self, store: &mut ParamStore) -> Result<()> {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);

        for i in 0..store.len() {
            let g = store.grad_at(i).values();
            if g.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("adam_update step {}", self.step),
                    detail: format!(
                        "gradient of `{}` contains NaN or infinity",
                        store.name_at(i)
                    ),
                });
            }
            let m = self.m[i].values_mut();
            let v = self.v[i].values_mut();
            for j in 0..g.len() {
                m[j] = self.beta1 * m[j] + (1.0 - self.beta1) * g[j];
                v[j] = self.beta2 * v[j] + (1.0 - self.beta2) * g[j] * g[j];
            }
        }
        for i in 0..store.len() {
            let m = self.m[i].values();
            let v = self.v[i].values();
            let pv = store.param_at_mut(i).values_mut();
            for j in 0..pv.len() {
                let mhat = m[j] / bc1;
                let vhat = v[j] / bc2;
                pv[j] -= self.lr * mhat / (vhat.sqrt() + self.eps);
            }
        }
        store.zero_grads();
        Ok(())
    }
}
