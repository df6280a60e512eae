//! Simulates the bundled ten-target scenario and writes its trace CSV.
//!
//! Usage: `simulate_scenario [SEED] [LAMBDA_C] [OUT.csv]`

use std::fs::File;
use std::io::BufWriter;

use lstm_mtf::scenario::{generate, ScenarioSpec};

fn main() -> lstm_mtf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().map_or(1, |s| s.parse().expect("seed"));
    let lambda_c: f64 = args.get(1).map_or(20.0, |s| s.parse().expect("clutter rate"));
    let out = args.get(2).cloned().unwrap_or_else(|| "trace.csv".into());

    let mut spec = ScenarioSpec::default_ten_targets();
    spec.clutter.lambda_c = lambda_c;
    let trace = generate(&spec, seed)?;

    let clutter: usize = trace
        .steps
        .iter()
        .map(|s| s.measurements.iter().filter(|m| m.source.is_none()).count())
        .sum();
    let alive: Vec<usize> = trace.steps.iter().map(|s| s.truths.len()).collect();
    println!("scenario {} ({} steps)", &spec.hash()[..12], trace.steps.len());
    println!("targets alive per step: min {} max {}", alive.iter().min().unwrap(), alive.iter().max().unwrap());
    println!("clutter per step: {:.2}", clutter as f64 / trace.steps.len() as f64);

    trace.write_csv(BufWriter::new(File::create(&out)?))?;
    println!("wrote {out}");
    Ok(())
}
