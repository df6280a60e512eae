//! Builds the residual grid for a handful of predictions and measurements
//! and prints how each target and measurement is classified.

use lstm_mtf::association::{associate, ResidualGrid};
use lstm_mtf::tracklets::AssociationConfig;

fn main() {
    let cfg = AssociationConfig {
        g_min: 10.0,
        g_max: 45.0,
        ..AssociationConfig::default()
    };
    let predictions = [[0.0, 0.0], [100.0, 0.0], [-200.0, 40.0]];
    let maturities = [3, 1, 4];
    let measurements = [[3.0, 4.0], [130.0, 0.0], [500.0, 500.0]];

    let grid = ResidualGrid::build(&predictions, &measurements);
    println!("targetness (rows = measurements):");
    for n in 0..grid.num_measurements() {
        let row: Vec<String> = (0..grid.num_targets()).map(|m| format!("{:8.2}", grid.get(n, m))).collect();
        println!("  z{n}: {}", row.join(" "));
    }
    println!("nearest target per measurement {:?}", grid.nearest_target);
    println!("nearest measurement per target {:?}", grid.nearest_measurement);
    println!("hits per target {:?}, per measurement {:?}", grid.target_hits, grid.measurement_hits);

    let out = associate(&grid, &maturities, &cfg);
    for s in &out.survivals {
        println!("target {} survives on z{} (g = {:.2})", s.target, s.measurement, s.genuinity);
    }
    for f in &out.freezes {
        println!("target {} frozen: {:?}", f.target, f.reason);
    }
    for b in &out.births {
        println!("z{b} starts a new target");
    }
}
