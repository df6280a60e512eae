//! Fine-tunes the LSTM online on a short constant-velocity patch and
//! compares its next-position prediction before and after training.

use lstm_mtf::lstm::{predict_next, train_online, AdamState, LstmParams, LstmShape, TrainConfig};
use lstm_mtf::rng::{stream, Stream};

fn main() -> lstm_mtf::Result<()> {
    let patch: Vec<[f64; 2]> = (0..8).map(|k| [-400.0 + 12.0 * k as f64, 250.0 - 7.0 * k as f64]).collect();
    let truth = [-400.0 + 12.0 * 8.0, 250.0 - 7.0 * 8.0];
    let cfg = TrainConfig {
        epochs: 200,
        ..TrainConfig::default()
    };

    let mut params = LstmParams::glorot(LstmShape::default(), &mut stream(7, Stream::Weights));
    let (rows, origin) = cfg.normalize(&patch);
    let before = cfg.denormalize(&predict_next(&params, &rows)?, origin);

    let mut adam = AdamState::new(&params, cfg.adam);
    let training = train_online(&mut params, &mut adam, &rows, &cfg)?;
    let after = cfg.denormalize(&predict_next(&params, &rows)?, origin);

    if let lstm_mtf::lstm::Training::Trained { losses } = &training {
        for (e, l) in losses.iter().enumerate().step_by(25) {
            println!("epoch {e:>3}  loss {l:.6}");
        }
    }
    let err = |p: [f64; 2]| (p[0] - truth[0]).hypot(p[1] - truth[1]);
    println!("next position   {truth:?}");
    println!("before training {before:.2?}  error {:.2}", err(before));
    println!("after training  {after:.2?}  error {:.2}", err(after));
    Ok(())
}
