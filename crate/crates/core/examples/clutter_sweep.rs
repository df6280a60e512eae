//! Sweeps the clutter rate over a shortened scenario and prints the
//! seed-averaged OSPA curve. Cell outputs go to `out/sweep-example`.

use lstm_mtf::bench::{cmd_sweep, ExperimentConfig};

fn main() -> lstm_mtf::Result<()> {
    let cfg = ExperimentConfig {
        lambda_c: vec![0.0, 10.0, 20.0, 40.0],
        seeds: vec![1, 2],
        steps: Some(40),
        out_dir: "out/sweep-example".into(),
        ..ExperimentConfig::default()
    };
    let report = cmd_sweep(&cfg)?;
    for (lambda_c, mean) in report.curve() {
        println!("λ_c = {lambda_c:>4}: mean OSPA {mean:.2}");
    }
    for r in report.failures() {
        if let Err(e) = &r.outcome {
            eprintln!("λ_c = {} seed {} failed: {e}", r.lambda_c, r.seed);
        }
    }
    Ok(())
}
