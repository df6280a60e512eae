use super::params::{Gate, LstmParams, LstmState};
use crate::error::{Error, Result};

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations of one layer at one time step, kept for backpropagation.
#[derive(Clone, Debug, Default)]
pub(crate) struct LayerRecord {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    /// Activated gates, indexed by [`Gate`].
    pub gates: [Vec<f64>; 4],
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

/// Unrolled forward pass over a sequence: `records[t][layer]` and `outputs[t]`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tape {
    pub records: Vec<Vec<LayerRecord>>,
    pub outputs: Vec<Vec<f64>>,
}

fn layer_step(
    params: &LstmParams,
    layer: usize,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    rec: &mut LayerRecord,
) {
    let p = &params.layers[layer];
    let hidden = p.hidden_size();
    rec.x.clear();
    rec.x.extend_from_slice(x);
    rec.h_prev.clear();
    rec.h_prev.extend_from_slice(h_prev);
    rec.c_prev.clear();
    rec.c_prev.extend_from_slice(c_prev);

    for gate in Gate::ALL {
        let g = gate as usize;
        let a = &mut rec.gates[g];
        a.clear();
        a.extend_from_slice(&p.biases[g]);
        p.input_weights[g].mul_vec_acc(x, a);
        p.recurrent_weights[g].mul_vec_acc(h_prev, a);
        match gate {
            Gate::Candidate => a.iter_mut().for_each(|v| *v = v.tanh()),
            _ => a.iter_mut().for_each(|v| *v = sigmoid(*v)),
        }
    }

    rec.c.resize(hidden, 0.0);
    rec.tanh_c.resize(hidden, 0.0);
    rec.h.resize(hidden, 0.0);
    let [i, j, f, o] = &rec.gates;
    for k in 0..hidden {
        let c = c_prev[k] * f[k] + i[k] * j[k];
        rec.c[k] = c;
        rec.tanh_c[k] = c.tanh();
        rec.h[k] = rec.tanh_c[k] * o[k];
    }
}

fn output_layer(params: &LstmParams, h: &[f64], y: &mut Vec<f64>) {
    y.clear();
    y.extend_from_slice(&params.output_bias);
    params.output_weights.mul_vec_acc(h, y);
}

fn check_input(params: &LstmParams, x: &[f64]) -> Result<()> {
    if x.len() != params.input_size() {
        return Err(Error::Shape {
            what: "network input",
            expected: params.input_size(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Runs the stack over `rows` from a zero state, recording every activation.
pub(crate) fn forward_tape<R: AsRef<[f64]>>(
    params: &LstmParams,
    rows: &[R],
    tape: &mut Tape,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptySequence);
    }
    let layers = params.layers.len();
    let hidden = params.shape().hidden_size;
    tape.records.resize_with(rows.len(), Vec::new);
    tape.records.truncate(rows.len());
    tape.outputs.resize_with(rows.len(), Vec::new);
    tape.outputs.truncate(rows.len());

    let zeros = vec![0.0; hidden];
    for (t, row) in rows.iter().enumerate() {
        let x = row.as_ref();
        check_input(params, x)?;
        let (done, rest) = tape.records.split_at_mut(t);
        let current = &mut rest[0];
        current.resize_with(layers, LayerRecord::default);
        for l in 0..layers {
            let (h_prev, c_prev) = match done.last() {
                Some(prev) => (prev[l].h.as_slice(), prev[l].c.as_slice()),
                None => (zeros.as_slice(), zeros.as_slice()),
            };
            let (below, here) = current.split_at_mut(l);
            let input = if l == 0 { x } else { below[l - 1].h.as_slice() };
            layer_step(params, l, input, h_prev, c_prev, &mut here[0]);
        }
        output_layer(params, &current[layers - 1].h, &mut tape.outputs[t]);
    }
    Ok(())
}

/// One time step of the full stack: returns the output and the next state.
pub fn forward_step(
    params: &LstmParams,
    state: &LstmState,
    x: &[f64],
) -> Result<(Vec<f64>, LstmState)> {
    check_input(params, x)?;
    let layers = params.layers.len();
    if state.h.len() != layers || state.c.len() != layers {
        return Err(Error::Shape {
            what: "state layers",
            expected: layers,
            found: state.h.len().min(state.c.len()),
        });
    }
    let hidden = params.shape().hidden_size;
    if let Some(bad) = state.h.iter().chain(&state.c).find(|v| v.len() != hidden) {
        return Err(Error::Shape {
            what: "state vector",
            expected: hidden,
            found: bad.len(),
        });
    }

    let mut next = LstmState {
        h: Vec::with_capacity(layers),
        c: Vec::with_capacity(layers),
    };
    let mut rec = LayerRecord::default();
    for l in 0..layers {
        let input = if l == 0 { x } else { next.h[l - 1].as_slice() };
        layer_step(params, l, input, &state.h[l], &state.c[l], &mut rec);
        next.h.push(rec.h.clone());
        next.c.push(rec.c.clone());
    }
    let mut y = Vec::new();
    output_layer(params, &next.h[layers - 1], &mut y);
    Ok((y, next))
}

/// Feeds `rows` in order from a zero state; output `t` predicts row `t + 1`.
pub fn forward_sequence<R: AsRef<[f64]>>(params: &LstmParams, rows: &[R]) -> Result<Vec<Vec<f64>>> {
    let mut tape = Tape::default();
    forward_tape(params, rows, &mut tape)?;
    Ok(tape.outputs)
}

/// Prediction for the row following the last one in `rows`.
pub fn predict_next<R: AsRef<[f64]>>(params: &LstmParams, rows: &[R]) -> Result<Vec<f64>> {
    let mut outputs = forward_sequence(params, rows)?;
    Ok(outputs.pop().expect("forward_sequence yields one output per row"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lstm::params::LstmShape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_shape() -> LstmShape {
        LstmShape {
            input_size: 2,
            hidden_size: 4,
            num_layers: 3,
            output_size: 2,
        }
    }

    #[test]
    fn zero_params_give_half_gates_and_zero_output() {
        let params = LstmParams::zeros(LstmShape::default());
        let mut tape = Tape::default();
        forward_tape(&params, &[[0.3, -0.7]], &mut tape).unwrap();
        for rec in &tape.records[0] {
            assert!(rec.gates[Gate::Input as usize].iter().all(|v| *v == 0.5));
            assert!(rec.gates[Gate::Forget as usize].iter().all(|v| *v == 0.5));
            assert!(rec.gates[Gate::Output as usize].iter().all(|v| *v == 0.5));
            assert!(rec.gates[Gate::Candidate as usize].iter().all(|v| *v == 0.0));
            assert!(rec.c.iter().chain(&rec.h).all(|v| *v == 0.0));
        }
        assert_eq!(tape.outputs[0], vec![0.0, 0.0]);
    }

    #[test]
    fn output_bias_passes_through_identity_activation() {
        let mut params = LstmParams::zeros(LstmShape::default());
        params.output_bias = vec![1.0, 2.0];
        let state = LstmState::zeros(&params);
        let (y, _) = forward_step(&params, &state, &[5.0, -3.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0]);
    }

    #[test]
    fn single_row_sequence_gives_one_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = LstmParams::glorot(small_shape(), &mut rng);
        let out = forward_sequence(&params, &[[0.1, 0.2]]).unwrap();
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn sequence_equals_repeated_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = LstmParams::glorot(small_shape(), &mut rng);
        let rows = [[0.1, 0.2], [0.15, 0.22], [0.2, 0.25], [-0.4, 0.9]];
        let seq = forward_sequence(&params, &rows).unwrap();
        let mut state = LstmState::zeros(&params);
        for (row, expected) in rows.iter().zip(&seq) {
            let (y, next) = forward_step(&params, &state, row).unwrap();
            assert_eq!(&y, expected);
            state = next;
        }
        assert_eq!(predict_next(&params, &rows).unwrap(), seq[3]);
    }

    #[test]
    fn empty_sequence_and_bad_width_are_rejected() {
        let params = LstmParams::zeros(small_shape());
        let empty: [[f64; 2]; 0] = [];
        assert!(matches!(forward_sequence(&params, &empty), Err(Error::EmptySequence)));
        assert!(matches!(
            forward_sequence(&params, &[vec![1.0, 2.0, 3.0]]),
            Err(Error::Shape { expected: 2, found: 3, .. })
        ));
        let state = LstmState::zeros(&params);
        assert!(forward_step(&params, &state, &[1.0]).is_err());
    }
}
