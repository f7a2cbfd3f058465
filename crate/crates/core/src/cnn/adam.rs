//! Adam optimizer over the flattened model parameters.

use serde::{Deserialize, Serialize};

use super::{CnnModel, Gradients};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Adam hyperparameters. Defaults are the standard
/// `lr = 1e-3, β₁ = 0.9, β₂ = 0.999, ε = 1e-8`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0
            && self.learning_rate.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "Adam hyperparameters out of range: lr {}, beta1 {}, beta2 {}, eps {}",
                self.learning_rate, self.beta1, self.beta2, self.epsilon
            )))
        }
    }
}

/// First and second moment estimates, congruent to the model's flat
/// parameter vector.
#[derive(Clone, Debug)]
pub struct AdamState<T> {
    params: AdamParams,
    step: u64,
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> AdamState<T> {
    pub fn new(params: AdamParams, param_count: usize) -> Result<Self> {
        params.validate()?;
        Ok(AdamState {
            params,
            step: 0,
            m: vec![T::zero(); param_count],
            v: vec![T::zero(); param_count],
        })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one bias-corrected Adam update in place.
    pub fn step(&mut self, model: &mut CnnModel<T>, grads: &Gradients<T>) -> Result<()> {
        let flat_g = grads.to_flat();
        if flat_g.len() != self.m.len() {
            return Err(Error::LengthMismatch {
                left: flat_g.len(),
                right: self.m.len(),
            });
        }
        self.step += 1;
        let t = self.step as i32;
        let one = T::one();
        let lr = lit::<T>(self.params.learning_rate);
        let b1 = lit::<T>(self.params.beta1);
        let b2 = lit::<T>(self.params.beta2);
        let eps = lit::<T>(self.params.epsilon);
        let m_corr = one / (one - b1.powi(t));
        let v_corr = one / (one - b2.powi(t));
        let (m, v) = (&mut self.m, &mut self.v);
        let mut offset = 0;
        model.for_each_param_slice_mut(|slice| {
            for (k, p) in slice.iter_mut().enumerate() {
                let i = offset + k;
                let g = flat_g[i];
                m[i] = b1 * m[i] + (one - b1) * g;
                v[i] = b2 * v[i] + (one - b2) * g * g;
                let m_hat = m[i] * m_corr;
                let v_hat = v[i] * v_corr;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            }
            offset += slice.len();
        });
        Ok(())
    }
}
