use serde::{Deserialize, Serialize};

use super::params::LstmParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators shaped like the network, plus the update counter.
#[derive(Clone, Debug)]
pub struct AdamState {
    pub config: AdamConfig,
    m: LstmParams,
    v: LstmParams,
    t: u64,
}

impl AdamState {
    pub fn new(params: &LstmParams, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn is_finite(&self) -> bool {
        self.m.is_finite() && self.v.is_finite()
    }

    /// One bias-corrected Adam update of `params` along `grad`.
    pub fn step(&mut self, params: &mut LstmParams, grad: &LstmParams) {
        self.t += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let bias1 = 1.0 - beta1.powi(self.t as i32);
        let bias2 = 1.0 - beta2.powi(self.t as i32);
        let step_size = lr / bias1;

        let blocks = params
            .slices_mut()
            .into_iter()
            .zip(self.m.slices_mut())
            .zip(self.v.slices_mut())
            .zip(grad.slices());
        for (((p, m), v), g) in blocks {
            for k in 0..p.len() {
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                p[k] -= step_size * m[k] / ((v[k] / bias2).sqrt() + epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lstm::params::LstmShape;

    #[test]
    fn first_step_moves_each_weight_by_lr_against_gradient_sign() {
        let shape = LstmShape {
            input_size: 1,
            hidden_size: 1,
            num_layers: 1,
            output_size: 1,
        };
        let mut params = LstmParams::zeros(shape);
        let mut grad = params.zeros_like();
        grad.output_bias[0] = 3.0;
        grad.output_weights.set(0, 0, -0.5);
        let lr = AdamConfig::default().lr;
        let mut adam = AdamState::new(&params, AdamConfig::default());
        adam.step(&mut params, &grad);
        assert_eq!(adam.steps(), 1);
        // bias-corrected first step is lr · g / (|g| + eps)
        assert!((params.output_bias[0] + lr).abs() < 1e-9);
        assert!((params.output_weights.get(0, 0) - lr).abs() < 1e-9);
        assert_eq!(params.layers[0].biases[0][0], 0.0);
    }
}
