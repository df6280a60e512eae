//! Compares BPTT gradients with central finite differences on a small
//! network.

use lstm_mtf::lstm::{loss_and_gradient, sequence_loss, LstmParams, LstmShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lstm_mtf::Result<()> {
    let shape = LstmShape {
        input_size: 2,
        hidden_size: 4,
        num_layers: 2,
        output_size: 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut params = LstmParams::glorot(shape, &mut rng);
    let rows: Vec<[f64; 2]> = (0..6).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();

    let (loss, grad) = loss_and_gradient(&params, &rows)?;
    println!("loss {loss:.8}, {} parameters", params.num_params());

    let h = 1e-5;
    let (mut worst, mut max_abs): (f64, f64) = (0.0, 0.0);
    let grads: Vec<Vec<f64>> = grad.slices().iter().map(|s| s.to_vec()).collect();
    for (si, g) in grads.iter().enumerate() {
        for k in 0..g.len() {
            let orig = params.slices()[si][k];
            params.slices_mut()[si][k] = orig + h;
            let up = sequence_loss(&params, &rows)?;
            params.slices_mut()[si][k] = orig - h;
            let down = sequence_loss(&params, &rows)?;
            params.slices_mut()[si][k] = orig;
            let numeric = (up - down) / (2.0 * h);
            let diff = (g[k] - numeric).abs();
            max_abs = max_abs.max(diff);
            if diff > 1e-7 {
                worst = worst.max(diff / g[k].abs().max(numeric.abs()));
            }
        }
    }
    // Relative error is only meaningful once the absolute gap clears rounding noise.
    println!("max |analytic - numeric| {max_abs:.3e}, worst relative error above 1e-7: {worst:.3e}");
    Ok(())
}
