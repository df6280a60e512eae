//! Residual grid between predicted targets and measurements, and the
//! threshold-based association that sorts targets into survivals and
//! freezes and measurements into births.

use crate::tracklets::{distance, AssociationConfig, Point};

/// Targetness matrix and the row/column reductions derived from it.
///
/// Rows are measurements (`n`), columns are predicted targets (`m`).
/// With no targets the per-measurement argmin/min vectors are empty; with
/// no measurements the per-target ones are. Histograms always have their
/// full length.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualGrid {
    num_measurements: usize,
    num_targets: usize,
    /// Row-major `N × M` distances.
    targetness: Vec<f64>,
    /// For each measurement, the nearest target.
    pub nearest_target: Vec<usize>,
    /// For each target, the nearest measurement.
    pub nearest_measurement: Vec<usize>,
    /// For each measurement, the distance to its nearest target.
    pub measurement_gap: Vec<f64>,
    /// For each target, the distance to its nearest measurement.
    pub target_gap: Vec<f64>,
    /// Number of measurements whose nearest target is `m`.
    pub target_hits: Vec<usize>,
    /// Number of targets whose nearest measurement is `n`.
    pub measurement_hits: Vec<usize>,
}

/// Index and value of the minimum; ties go to the lowest index.
fn argmin<I: Iterator<Item = f64>>(values: I) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values.enumerate() {
        match best {
            Some((_, b)) if !(v < b) => {}
            _ => best = Some((k, v)),
        }
    }
    best
}

impl ResidualGrid {
    pub fn build(predictions: &[Point], measurements: &[Point]) -> Self {
        let n = measurements.len();
        let m = predictions.len();
        let mut targetness = Vec::with_capacity(n * m);
        for z in measurements {
            targetness.extend(predictions.iter().map(|x| distance(x, z)));
        }
        let mut grid = ResidualGrid {
            num_measurements: n,
            num_targets: m,
            targetness,
            nearest_target: Vec::new(),
            nearest_measurement: Vec::new(),
            measurement_gap: Vec::new(),
            target_gap: Vec::new(),
            target_hits: vec![0; m],
            measurement_hits: vec![0; n],
        };
        if m > 0 {
            for row in 0..n {
                let (k, v) = argmin((0..m).map(|col| grid.get(row, col))).unwrap();
                grid.nearest_target.push(k);
                grid.measurement_gap.push(v);
                grid.target_hits[k] += 1;
            }
        }
        if n > 0 {
            for col in 0..m {
                let (k, v) = argmin((0..n).map(|row| grid.get(row, col))).unwrap();
                grid.nearest_measurement.push(k);
                grid.target_gap.push(v);
                grid.measurement_hits[k] += 1;
            }
        }
        grid
    }

    pub fn num_measurements(&self) -> usize {
        self.num_measurements
    }

    pub fn num_targets(&self) -> usize {
        self.num_targets
    }

    /// Distance between measurement `n` and predicted target `m`.
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.targetness[n * self.num_targets + m]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Survival {
    pub target: usize,
    pub measurement: usize,
    pub genuinity: f64,
}

/// Which condition left a target without a trusted measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreezeReason {
    /// No measurement picked it and it is mature: possible occlusion.
    Occluded,
    /// No measurement picked it and it is still immature.
    Immature,
    /// Nearest measurement within `[g_min, g_max]`: possible clutter.
    Clutter,
    /// Nearest measurement beyond `g_max`.
    TooFar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Freeze {
    pub target: usize,
    pub reason: FreezeReason,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssociationOutcome {
    pub survivals: Vec<Survival>,
    pub freezes: Vec<Freeze>,
    /// Filled by the caller once freezes have been applied.
    pub deaths: Vec<usize>,
    pub births: Vec<usize>,
}

impl AssociationOutcome {
    pub fn frozen_targets(&self) -> Vec<usize> {
        self.freezes.iter().map(|f| f.target).collect()
    }
}

/// Classifies every target and measurement of `grid`.
///
/// A target survives on its nearest measurement when at least one
/// measurement picked it as nearest and that measurement is closer than
/// `g_min`. Every other target is frozen: unassociated mature targets
/// (possible occlusion), associations in `[g_min, g_max]` (possible
/// clutter), unassociated immature targets, and associations beyond `g_max`.
///
/// A measurement is a birth when no target picked it or it lies beyond
/// `g_max` from every target, unless a survival already consumed it.
pub fn associate(grid: &ResidualGrid, maturities: &[i32], cfg: &AssociationConfig) -> AssociationOutcome {
    assert_eq!(
        maturities.len(),
        grid.num_targets(),
        "one maturity per predicted target"
    );
    let mut out = AssociationOutcome::default();
    let mut consumed = vec![false; grid.num_measurements()];

    for (target, &maturity) in maturities.iter().enumerate() {
        let hits = grid.target_hits[target];
        if hits == 0 {
            let reason = if maturity >= cfg.m_min {
                FreezeReason::Occluded
            } else {
                FreezeReason::Immature
            };
            out.freezes.push(Freeze { target, reason });
            continue;
        }
        let gap = grid.target_gap[target];
        if gap < cfg.g_min {
            let measurement = grid.nearest_measurement[target];
            consumed[measurement] = true;
            out.survivals.push(Survival {
                target,
                measurement,
                genuinity: gap,
            });
        } else {
            let reason = if gap <= cfg.g_max {
                FreezeReason::Clutter
            } else {
                FreezeReason::TooFar
            };
            out.freezes.push(Freeze { target, reason });
        }
    }

    for n in 0..grid.num_measurements() {
        if consumed[n] {
            continue;
        }
        if grid.measurement_hits[n] == 0 || grid.measurement_gap[n] > cfg.g_max {
            out.births.push(n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Thresholds of the worked examples: g_min 10, g_max 45.
    fn cfg() -> AssociationConfig {
        AssociationConfig {
            g_min: 10.0,
            g_max: 45.0,
            ..AssociationConfig::default()
        }
    }

    #[test]
    fn three_four_five() {
        let g = ResidualGrid::build(&[[0.0, 0.0]], &[[3.0, 4.0]]);
        assert_eq!(g.get(0, 0), 5.0);
        assert_eq!(g.nearest_target, vec![0]);
        assert_eq!(g.nearest_measurement, vec![0]);
        assert_eq!(g.measurement_gap, vec![5.0]);
        assert_eq!(g.target_gap, vec![5.0]);
        assert_eq!(g.target_hits, vec![1]);
        assert_eq!(g.measurement_hits, vec![1]);
    }

    #[test]
    fn empty_sides() {
        let g = ResidualGrid::build(&[[0.0, 0.0], [1.0, 1.0]], &[]);
        assert_eq!(g.num_measurements(), 0);
        assert_eq!(g.target_hits, vec![0, 0]);
        assert!(g.nearest_measurement.is_empty() && g.target_gap.is_empty());
        let out = associate(&g, &[3, 1], &cfg());
        assert_eq!(out.frozen_targets(), vec![0, 1]);
        assert_eq!(out.freezes[0].reason, FreezeReason::Occluded);
        assert_eq!(out.freezes[1].reason, FreezeReason::Immature);
        assert!(out.survivals.is_empty() && out.births.is_empty());

        let g = ResidualGrid::build(&[], &[[0.0, 0.0], [5.0, 5.0]]);
        assert_eq!(g.measurement_hits, vec![0, 0]);
        assert!(g.nearest_target.is_empty());
        let out = associate(&g, &[], &cfg());
        assert_eq!(out.births, vec![0, 1]);
    }

    #[test]
    fn ties_prefer_lowest_index() {
        let g = ResidualGrid::build(&[[1.0, 0.0], [-1.0, 0.0]], &[[0.0, 0.0]]);
        assert_eq!(g.nearest_target, vec![0]);
        assert_eq!(g.target_hits, vec![1, 0]);
    }

    #[test]
    fn survival_branch() {
        let g = ResidualGrid::build(&[[0.0, 0.0]], &[[4.0, 0.0]]);
        let out = associate(&g, &[3], &cfg());
        assert_eq!(
            out.survivals,
            vec![Survival {
                target: 0,
                measurement: 0,
                genuinity: 4.0
            }]
        );
        assert!(out.freezes.is_empty() && out.births.is_empty());
    }

    #[test]
    fn occlusion_window_freezes_without_birth() {
        let g = ResidualGrid::build(&[[0.0, 0.0]], &[[30.0, 0.0]]);
        let out = associate(&g, &[3], &cfg());
        assert_eq!(
            out.freezes,
            vec![Freeze {
                target: 0,
                reason: FreezeReason::Clutter
            }]
        );
        assert!(out.survivals.is_empty() && out.births.is_empty());
    }

    #[test]
    fn far_measurement_freezes_target_and_births() {
        let g = ResidualGrid::build(&[[0.0, 0.0]], &[[100.0, 0.0]]);
        let out = associate(&g, &[1], &cfg());
        assert_eq!(out.freezes[0].reason, FreezeReason::TooFar);
        assert_eq!(out.births, vec![0]);
    }

    #[test]
    fn shared_measurement_serves_several_targets() {
        let g = ResidualGrid::build(&[[0.0, 0.0], [2.0, 0.0]], &[[1.0, 0.0]]);
        // Only target 0 is picked by the measurement (tie → lowest index),
        // so target 1 has no hits and freezes.
        let out = associate(&g, &[3, 3], &cfg());
        assert_eq!(out.survivals.len(), 1);
        assert_eq!(out.frozen_targets(), vec![1]);
    }
}
