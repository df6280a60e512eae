//! Runs the filter over the bundled scenario and prints per-step OSPA.
//!
//! Usage: `filter_scenario [SEED] [LAMBDA_C] [STEPS]`

use lstm_mtf::bench::{run_cell, ExperimentConfig};

fn main() -> lstm_mtf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().map_or(1, |s| s.parse().expect("seed"));
    let lambda_c: f64 = args.get(1).map_or(20.0, |s| s.parse().expect("clutter rate"));
    let cfg = ExperimentConfig {
        steps: args.get(2).map(|s| s.parse().expect("steps")),
        ..ExperimentConfig::default()
    };
    let spec = cfg.scenario_spec()?;
    let cell = run_cell(&cfg, &spec, lambda_c, seed)?;

    println!("{:>4} {:>6} {:>6} {:>8} {:>8} {:>8}", "step", "truth", "est", "ospa", "loc", "card");
    for (row, step) in cell.summary.series.iter().zip(&cell.run.steps) {
        println!(
            "{:>4} {:>6} {:>6} {:>8.2} {:>8.2} {:>8.2}",
            row.step,
            step.truths.len(),
            step.estimates.len(),
            row.total,
            row.loc,
            row.card
        );
    }
    let s = &cell.summary;
    println!("mean OSPA {:.2} ± {:.2} (loc {:.2}, card {:.2})", s.mean_total, s.std_total, s.mean_loc, s.mean_card);
    Ok(())
}
