//! Teacher-forced one-step-ahead loss and its exact gradient by
//! backpropagation through time.
//!
//! Inputs are `rows[0..M-1]`, targets are `rows[1..M]`. The loss is the
//! squared error averaged over the `M-1` pairs and the output coordinates.

use super::forward::{forward_tape, Tape};
use super::params::{Gate, LstmParams};
use crate::error::{Error, Result};

fn check_rows<R: AsRef<[f64]>>(params: &LstmParams, rows: &[R]) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::Shape {
            what: "training rows (need at least one input/target pair)",
            expected: 2,
            found: rows.len(),
        });
    }
    let out = params.output_size();
    if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != out) {
        return Err(Error::Shape {
            what: "training target",
            expected: out,
            found: bad.as_ref().len(),
        });
    }
    Ok(())
}

fn mse<R: AsRef<[f64]>>(outputs: &[Vec<f64>], rows: &[R]) -> f64 {
    let pairs = rows.len() - 1;
    let dim = outputs[0].len();
    let sum: f64 = outputs[..pairs]
        .iter()
        .zip(&rows[1..])
        .map(|(y, target)| {
            y.iter()
                .zip(target.as_ref())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    sum / (pairs * dim) as f64
}

/// Loss only; used by finite-difference checks and diagnostics.
pub fn sequence_loss<R: AsRef<[f64]>>(params: &LstmParams, rows: &[R]) -> Result<f64> {
    check_rows(params, rows)?;
    let mut tape = Tape::default();
    forward_tape(params, &rows[..rows.len() - 1], &mut tape)?;
    Ok(mse(&tape.outputs, rows))
}

/// Loss and full gradient with respect to every parameter.
pub fn loss_and_gradient<R: AsRef<[f64]>>(params: &LstmParams, rows: &[R]) -> Result<(f64, LstmParams)> {
    let mut grad = params.zeros_like();
    let mut ws = Workspace::default();
    let loss = ws.loss_and_gradient(params, rows, &mut grad)?;
    Ok((loss, grad))
}

/// Reusable buffers for repeated gradient evaluations on one patch.
#[derive(Default)]
pub(crate) struct Workspace {
    tape: Tape,
}

impl Workspace {
    /// Overwrites `grad` with the gradient and returns the loss.
    pub fn loss_and_gradient<R: AsRef<[f64]>>(
        &mut self,
        params: &LstmParams,
        rows: &[R],
        grad: &mut LstmParams,
    ) -> Result<f64> {
        check_rows(params, rows)?;
        let pairs = rows.len() - 1;
        forward_tape(params, &rows[..pairs], &mut self.tape)?;
        let loss = mse(&self.tape.outputs, rows);

        for s in grad.slices_mut() {
            s.iter_mut().for_each(|v| *v = 0.0);
        }

        let layers = params.layers.len();
        let hidden = params.shape().hidden_size;
        let out_dim = params.output_size();
        let scale = 2.0 / (pairs * out_dim) as f64;

        let mut dh_next = vec![vec![0.0; hidden]; layers];
        let mut dc_next = vec![vec![0.0; hidden]; layers];
        let mut dy = vec![0.0; out_dim];
        let mut dh = vec![0.0; hidden];
        let mut dx = vec![0.0; hidden];
        let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hidden]);

        for t in (0..pairs).rev() {
            let records = &self.tape.records[t];
            for ((d, y), target) in dy.iter_mut().zip(&self.tape.outputs[t]).zip(rows[t + 1].as_ref()) {
                *d = (y - target) * scale;
            }
            grad.output_weights.add_outer(&dy, &records[layers - 1].h);
            for (b, d) in grad.output_bias.iter_mut().zip(&dy) {
                *b += d;
            }
            dh.copy_from_slice(&dh_next[layers - 1]);
            params.output_weights.mul_t_vec_acc(&dy, &mut dh);

            for l in (0..layers).rev() {
                if l + 1 < layers {
                    // dx holds the gradient w.r.t. this layer's output coming from layer l+1.
                    for ((a, b), c) in dh.iter_mut().zip(&dx).zip(&dh_next[l]) {
                        *a = b + c;
                    }
                }
                let rec = &records[l];
                let [i, j, f, o] = &rec.gates;
                let dc = &mut dc_next[l];
                for k in 0..hidden {
                    let d_o = dh[k] * rec.tanh_c[k];
                    let d_c = dh[k] * o[k] * (1.0 - rec.tanh_c[k] * rec.tanh_c[k]) + dc[k];
                    let d_i = d_c * j[k];
                    let d_j = d_c * i[k];
                    let d_f = d_c * rec.c_prev[k];
                    da[Gate::Input as usize][k] = d_i * i[k] * (1.0 - i[k]);
                    da[Gate::Candidate as usize][k] = d_j * (1.0 - j[k] * j[k]);
                    da[Gate::Forget as usize][k] = d_f * f[k] * (1.0 - f[k]);
                    da[Gate::Output as usize][k] = d_o * o[k] * (1.0 - o[k]);
                    dc[k] = d_c * f[k];
                }

                let p = &params.layers[l];
                let g = &mut grad.layers[l];
                let dh_rec = &mut dh_next[l];
                dh_rec.iter_mut().for_each(|v| *v = 0.0);
                if l > 0 {
                    dx.iter_mut().for_each(|v| *v = 0.0);
                }
                for gate in 0..4 {
                    g.input_weights[gate].add_outer(&da[gate], &rec.x);
                    g.recurrent_weights[gate].add_outer(&da[gate], &rec.h_prev);
                    for (b, d) in g.biases[gate].iter_mut().zip(&da[gate]) {
                        *b += d;
                    }
                    p.recurrent_weights[gate].mul_t_vec_acc(&da[gate], dh_rec);
                    if l > 0 {
                        p.input_weights[gate].mul_t_vec_acc(&da[gate], &mut dx);
                    }
                }
            }
        }
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lstm::params::LstmShape;

    #[test]
    fn zero_params_loss_is_mean_square_of_targets() {
        let params = LstmParams::zeros(LstmShape {
            input_size: 2,
            hidden_size: 3,
            num_layers: 2,
            output_size: 2,
        });
        let rows = [[0.0, 0.0], [1.0, 2.0], [3.0, 0.0]];
        // outputs are all zero: ((1 + 4) + (9 + 0)) / (2 pairs × 2 dims)
        assert_eq!(sequence_loss(&params, &rows).unwrap(), 14.0 / 4.0);
        let (loss, grad) = loss_and_gradient(&params, &rows).unwrap();
        assert_eq!(loss, 3.5);
        // dL/db_y = mean over pairs of 2(y - target)/dim
        assert_eq!(grad.output_bias, vec![-(1.0 + 3.0) / 2.0, -(2.0 + 0.0) / 2.0]);
    }

    #[test]
    fn single_row_is_rejected() {
        let params = LstmParams::zeros(LstmShape::default());
        assert!(sequence_loss(&params, &[[0.0, 0.0]]).is_err());
    }
}
