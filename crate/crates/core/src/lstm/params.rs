use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;

/// Gate order used by every per-gate array in this module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Candidate = 1,
    Forget = 2,
    Output = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Candidate, Gate::Forget, Gate::Output];
}

/// Network dimensions. The default is the 3×20 stack over planar positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LstmShape {
    pub input_size: usize,
    pub hidden_size: usize,
    pub num_layers: usize,
    pub output_size: usize,
}

impl Default for LstmShape {
    fn default() -> Self {
        LstmShape {
            input_size: 2,
            hidden_size: 20,
            num_layers: 3,
            output_size: 2,
        }
    }
}

/// One LSTM layer: per-gate input weights `A`, recurrent weights `B` and
/// biases `b`, indexed by [`Gate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmLayerParams {
    pub input_weights: [Matrix; 4],
    pub recurrent_weights: [Matrix; 4],
    pub biases: [Vec<f64>; 4],
}

impl LstmLayerParams {
    pub fn zeros(input_size: usize, hidden_size: usize) -> Self {
        LstmLayerParams {
            input_weights: std::array::from_fn(|_| Matrix::zeros(hidden_size, input_size)),
            recurrent_weights: std::array::from_fn(|_| Matrix::zeros(hidden_size, hidden_size)),
            biases: std::array::from_fn(|_| vec![0.0; hidden_size]),
        }
    }

    pub fn input_size(&self) -> usize {
        self.input_weights[0].cols()
    }

    pub fn hidden_size(&self) -> usize {
        self.input_weights[0].rows()
    }
}

/// Full network: the layer stack plus the linear output layer `y = C·h + b_y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub layers: Vec<LstmLayerParams>,
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(shape: LstmShape) -> Self {
        let layers = (0..shape.num_layers)
            .map(|l| {
                let input = if l == 0 {
                    shape.input_size
                } else {
                    shape.hidden_size
                };
                LstmLayerParams::zeros(input, shape.hidden_size)
            })
            .collect();
        LstmParams {
            layers,
            output_weights: Matrix::zeros(shape.output_size, shape.hidden_size),
            output_bias: vec![0.0; shape.output_size],
        }
    }

    /// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)), zero biases.
    pub fn glorot<R: Rng + ?Sized>(shape: LstmShape, rng: &mut R) -> Self {
        let mut params = Self::zeros(shape);
        let mut fill = |m: &mut Matrix| {
            let limit = (6.0 / (m.rows() + m.cols()) as f64).sqrt();
            for w in m.as_mut_slice() {
                *w = rng.random_range(-limit..limit);
            }
        };
        for layer in &mut params.layers {
            for m in &mut layer.input_weights {
                fill(m);
            }
            for m in &mut layer.recurrent_weights {
                fill(m);
            }
        }
        fill(&mut params.output_weights);
        params
    }

    pub fn shape(&self) -> LstmShape {
        LstmShape {
            input_size: self.layers.first().map_or(0, |l| l.input_size()),
            hidden_size: self.layers.first().map_or(0, |l| l.hidden_size()),
            num_layers: self.layers.len(),
            output_size: self.output_bias.len(),
        }
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].input_size()
    }

    pub fn output_size(&self) -> usize {
        self.output_bias.len()
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.shape())
    }

    /// Every parameter block as a flat slice, in a fixed order.
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 12 + 2);
        for layer in &self.layers {
            out.extend(layer.input_weights.iter().map(Matrix::as_slice));
            out.extend(layer.recurrent_weights.iter().map(Matrix::as_slice));
            out.extend(layer.biases.iter().map(Vec::as_slice));
        }
        out.push(self.output_weights.as_slice());
        out.push(&self.output_bias);
        out
    }

    /// Mutable counterpart of [`LstmParams::slices`], same order.
    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 12 + 2);
        for layer in &mut self.layers {
            out.extend(layer.input_weights.iter_mut().map(Matrix::as_mut_slice));
            out.extend(layer.recurrent_weights.iter_mut().map(Matrix::as_mut_slice));
            out.extend(layer.biases.iter_mut().map(Vec::as_mut_slice));
        }
        out.push(self.output_weights.as_mut_slice());
        out.push(&mut self.output_bias);
        out
    }

    pub fn num_params(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    /// Shape consistency: layer l > 0 consumes layer l−1's hidden vector.
    pub fn is_consistent(&self) -> bool {
        let Some(first) = self.layers.first() else {
            return false;
        };
        let hidden = first.hidden_size();
        let layers_ok = self.layers.iter().enumerate().all(|(l, layer)| {
            let input = if l == 0 { first.input_size() } else { hidden };
            layer.input_weights.iter().all(|m| m.rows() == hidden && m.cols() == input)
                && layer
                    .recurrent_weights
                    .iter()
                    .all(|m| m.rows() == hidden && m.cols() == hidden)
                && layer.biases.iter().all(|b| b.len() == hidden)
        });
        layers_ok
            && self.output_weights.cols() == hidden
            && self.output_weights.rows() == self.output_bias.len()
    }
}

/// Hidden and cell vectors for every layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmState {
    pub h: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
}

impl LstmState {
    pub fn zeros(params: &LstmParams) -> Self {
        let hidden = params.shape().hidden_size;
        LstmState {
            h: vec![vec![0.0; hidden]; params.layers.len()],
            c: vec![vec![0.0; hidden]; params.layers.len()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_shape_is_three_by_twenty() {
        let p = LstmParams::zeros(LstmShape::default());
        assert_eq!(p.layers.len(), 3);
        assert_eq!(p.layers[0].input_size(), 2);
        assert_eq!(p.layers[1].input_size(), 20);
        assert_eq!(p.layers[2].hidden_size(), 20);
        assert!(p.is_consistent());
        // 4 gates × (20×2 + 20×20 + 20) + 2 × 4 × (20×20 + 20×20 + 20) + 2×20 + 2
        assert_eq!(p.num_params(), 4 * 460 + 2 * 4 * 820 + 42);
    }

    #[test]
    fn glorot_respects_limits_and_zero_biases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = LstmParams::glorot(LstmShape::default(), &mut rng);
        let limit = (6.0f64 / 22.0).sqrt();
        assert!(p.layers[0].input_weights[0]
            .as_slice()
            .iter()
            .all(|w| w.abs() < limit));
        assert!(p.layers.iter().all(|l| l.biases.iter().flatten().all(|b| *b == 0.0)));
        assert!(p.output_bias.iter().all(|b| *b == 0.0));
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(p, LstmParams::glorot(LstmShape::default(), &mut rng2));
    }
}
