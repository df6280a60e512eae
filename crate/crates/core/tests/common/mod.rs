#![allow(dead_code)]

use lstm_mtf::association::{associate, ResidualGrid};
use lstm_mtf::tracklets::{AssociationConfig, TrackletTuple};
use lstm_mtf::TargetId;
use lstm_mtf::lstm::{loss_and_gradient, sequence_loss, LstmParams, LstmShape};
use lstm_mtf::ospa::OspaConfig;
use lstm_mtf::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-4;
pub const FD_ABS_FLOOR: f64 = 1e-7;

#[derive(Debug)]
pub struct GradCheck {
    pub shape: LstmShape,
    pub rows: usize,
    pub checked: usize,
    pub failures: usize,
    pub worst_rel: f64,
}

/// Compares every analytic partial against a central difference.
pub fn gradient_check(layers: usize, hidden: usize, rows: usize, seed: u64) -> GradCheck {
    let shape = LstmShape {
        input_size: 2,
        hidden_size: hidden,
        num_layers: layers,
        output_size: 2,
    };
    let mut r = rng(seed);
    let mut params = LstmParams::glorot(shape, &mut r);
    // Non-zero biases so every term of the backward pass is exercised.
    for s in params.slices_mut() {
        for v in s.iter_mut() {
            *v += r.random_range(-0.2..0.2);
        }
    }
    let data: Vec<[f64; 2]> = (0..rows)
        .map(|_| [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)])
        .collect();

    let (_, grad) = loss_and_gradient(&params, &data).unwrap();
    let analytic: Vec<f64> = grad.slices().iter().flat_map(|s| s.iter().copied()).collect();

    let mut out = GradCheck {
        shape,
        rows,
        checked: 0,
        failures: 0,
        worst_rel: 0.0,
    };
    let mut flat = 0;
    let n_slices = params.slices().len();
    for si in 0..n_slices {
        let len = params.slices()[si].len();
        for k in 0..len {
            let orig = params.slices()[si][k];
            params.slices_mut()[si][k] = orig + FD_STEP;
            let up = sequence_loss(&params, &data).unwrap();
            params.slices_mut()[si][k] = orig - FD_STEP;
            let down = sequence_loss(&params, &data).unwrap();
            params.slices_mut()[si][k] = orig;

            let numeric = (up - down) / (2.0 * FD_STEP);
            let a = analytic[flat];
            let diff = (a - numeric).abs();
            if diff > FD_ABS_FLOOR {
                let rel = diff / a.abs().max(numeric.abs());
                out.worst_rel = out.worst_rel.max(rel);
                if rel > FD_REL_TOL {
                    out.failures += 1;
                }
            }
            out.checked += 1;
            flat += 1;
        }
    }
    out
}

/// The 27 configurations layers × hidden × rows ∈ {1,2,3} × {2,3,5} × {2,4,8}.
pub fn gradient_configs() -> Vec<(usize, usize, usize, u64)> {
    let mut v = Vec::new();
    let mut seed = 100;
    for layers in [1, 2, 3] {
        for hidden in [2, 3, 5] {
            for rows in [2, 4, 8] {
                v.push((layers, hidden, rows, seed));
                seed += 1;
            }
        }
    }
    v
}

pub fn random_set(r: &mut ChaCha8Rng, max_len: usize, extent: f64) -> Vec<Point> {
    let n = r.random_range(0..=max_len);
    (0..n)
        .map(|_| [r.random_range(-extent..extent), r.random_range(-extent..extent)])
        .collect()
}

fn injections(n_small: usize, n_large: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(i: usize, n_small: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i == n_small {
            f(cur);
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(i + 1, n_small, used, cur, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(0, n_small, &mut vec![false; n_large], &mut Vec::new(), f);
}

/// OSPA total by enumerating every injection of the smaller set.
pub fn brute_ospa(a: &[Point], b: &[Point], cfg: &OspaConfig) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if large.is_empty() {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    injections(small.len(), large.len(), &mut |pi| {
        let s: f64 = pi
            .iter()
            .enumerate()
            .map(|(i, &j)| lstm_mtf::tracklets::distance(&small[i], &large[j]).min(cfg.c).powf(cfg.p))
            .sum();
        best = best.min(s);
    });
    let card = cfg.c.powf(cfg.p) * (large.len() - small.len()) as f64;
    ((best + card) / large.len() as f64).powf(1.0 / cfg.p)
}

/// Minimum assignment cost by enumeration (rows ≤ cols).
pub fn brute_assignment(costs: &[Vec<f64>]) -> f64 {
    let cols = costs.first().map_or(0, Vec::len);
    let mut best = f64::INFINITY;
    injections(costs.len(), cols, &mut |pi| {
        let s: f64 = pi.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
        best = best.min(s);
    });
    best
}

/// Residual grid quantities recomputed with plain loops.
#[derive(Debug, PartialEq)]
pub struct BruteGrid {
    pub targetness: Vec<Vec<f64>>,
    pub nearest_target: Vec<usize>,
    pub nearest_measurement: Vec<usize>,
    pub measurement_gap: Vec<f64>,
    pub target_gap: Vec<f64>,
    pub target_hits: Vec<usize>,
    pub measurement_hits: Vec<usize>,
}

pub fn brute_grid(preds: &[Point], meas: &[Point]) -> BruteGrid {
    let (nt, nm) = (preds.len(), meas.len());
    let mut t = vec![vec![0.0; nt]; nm];
    for n in 0..nm {
        for m in 0..nt {
            t[n][m] = (preds[m][0] - meas[n][0]).hypot(preds[m][1] - meas[n][1]);
        }
    }
    let mut g = BruteGrid {
        targetness: t.clone(),
        nearest_target: Vec::new(),
        nearest_measurement: Vec::new(),
        measurement_gap: Vec::new(),
        target_gap: Vec::new(),
        target_hits: vec![0; nt],
        measurement_hits: vec![0; nm],
    };
    for n in 0..nm {
        if nt == 0 {
            break;
        }
        let mut best = 0;
        for m in 1..nt {
            if t[n][m] < t[n][best] {
                best = m;
            }
        }
        g.nearest_target.push(best);
        g.measurement_gap.push(t[n][best]);
        g.target_hits[best] += 1;
    }
    for m in 0..nt {
        if nm == 0 {
            break;
        }
        let mut best = 0;
        for n in 1..nm {
            if t[n][m] < t[best][m] {
                best = n;
            }
        }
        g.nearest_measurement.push(best);
        g.target_gap.push(t[best][m]);
        g.measurement_hits[best] += 1;
    }
    g
}

/// Bit-exact comparison of a built grid against the loop oracle.
pub fn grid_matches(grid: &ResidualGrid, oracle: &BruteGrid) -> bool {
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let cells_match = oracle.targetness.iter().enumerate().all(|(n, row)| {
        row.iter()
            .enumerate()
            .all(|(m, v)| grid.get(n, m).to_bits() == v.to_bits())
    });
    cells_match
        && grid.num_measurements() == oracle.targetness.len()
        && grid.nearest_target == oracle.nearest_target
        && grid.nearest_measurement == oracle.nearest_measurement
        && bits(&grid.measurement_gap) == bits(&oracle.measurement_gap)
        && bits(&grid.target_gap) == bits(&oracle.target_gap)
        && grid.target_hits == oracle.target_hits
        && grid.measurement_hits == oracle.measurement_hits
}

/// One filter step with the network replaced by "newest row + jitter".
#[derive(Clone, Debug)]
pub struct LifecycleStep {
    pub jitter: Vec<Point>,
    pub measurements: Vec<Point>,
}

pub fn random_assoc_config(r: &mut ChaCha8Rng) -> AssociationConfig {
    let m_min = r.random_range(0..4);
    let g_min = r.random_range(1.0..20.0);
    AssociationConfig {
        m_min,
        m_init: m_min + r.random_range(0..3),
        g_min,
        g_max: g_min + r.random_range(0.5..40.0),
        max_batch: r.random_range(1..12),
        m_max: m_min + r.random_range(0..8),
        death_floor: m_min - r.random_range(1..4),
    }
}

pub fn random_lifecycle(r: &mut ChaCha8Rng, steps: usize) -> Vec<LifecycleStep> {
    (0..steps)
        .map(|_| LifecycleStep {
            jitter: (0..r.random_range(1..4))
                .map(|_| [r.random_range(-15.0..15.0), r.random_range(-15.0..15.0)])
                .collect(),
            measurements: (0..r.random_range(0..7))
                .map(|_| [r.random_range(0.0..60.0_f64).round(), r.random_range(0.0..60.0_f64).round()])
                .collect(),
        })
        .collect()
}

/// Runs the association/lifecycle loop and checks every invariant after
/// each step; returns the first violation.
pub fn check_lifecycle(cfg: &AssociationConfig, steps: &[LifecycleStep]) -> Result<(), String> {
    cfg.validate().map_err(|e| format!("invalid config: {e}"))?;
    let mut targets: Vec<TrackletTuple> = Vec::new();
    let mut next_id = 0u64;
    let mut seen_ids = std::collections::BTreeSet::new();
    for (k, step) in steps.iter().enumerate() {
        let fail = |what: &str| Err(format!("step {k}: {what}"));
        let before = targets.len();
        let ids_before: Vec<TargetId> = targets.iter().map(|t| t.id()).collect();
        let x_hats: Vec<Point> = targets
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let j = step.jitter[i % step.jitter.len()];
                let p = t.newest();
                [p[0] + j[0], p[1] + j[1]]
            })
            .collect();
        let z = &step.measurements;
        let grid = ResidualGrid::build(&x_hats, z);
        let maturities: Vec<i32> = targets.iter().map(|t| t.maturity).collect();
        let out = associate(&grid, &maturities, cfg);

        // Survivals and freezes cover every target exactly once.
        let mut cover = vec![0; before];
        for s in &out.survivals {
            cover[s.target] += 1;
        }
        for f in &out.freezes {
            cover[f.target] += 1;
        }
        if cover.iter().any(|&c| c != 1) {
            return fail("survivals and freezes do not partition the targets");
        }
        let used: Vec<usize> = out.survivals.iter().map(|s| s.measurement).collect();
        if out.births.iter().any(|n| used.contains(n)) {
            return fail("a measurement is both a survival and a birth");
        }
        let mut births = out.births.clone();
        births.dedup();
        if births.len() != out.births.len() {
            return fail("duplicate birth");
        }

        for s in &out.survivals {
            let t = &mut targets[s.target];
            t.apply_survival(z[s.measurement], s.genuinity, cfg);
            if t.frozen || t.newest() != z[s.measurement] || t.genuinity != s.genuinity {
                return fail("survival postcondition");
            }
        }
        for f in &out.freezes {
            let t = &mut targets[f.target];
            t.apply_freeze(x_hats[f.target], cfg);
            if !t.frozen || t.newest() != x_hats[f.target] {
                return fail("freeze postcondition");
            }
        }
        let deaths = targets.iter().filter(|t| t.is_dead(cfg)).count();
        if out.survivals.iter().any(|s| targets[s.target].is_dead(cfg)) {
            return fail("a surviving target died");
        }
        targets.retain(|t| !t.is_dead(cfg));
        for &n in &out.births {
            let t = TrackletTuple::birth(z[n], cfg, TargetId(next_id));
            next_id += 1;
            if !seen_ids.insert(t.id()) {
                return fail("id reused");
            }
            targets.push(t);
        }

        if targets.len() != before - deaths + out.births.len() {
            return fail("cardinality bookkeeping");
        }
        let survivors: Vec<TargetId> = targets.iter().map(|t| t.id()).take(before - deaths).collect();
        if !survivors.iter().all(|id| ids_before.contains(id)) {
            return fail("id changed");
        }
        for t in &targets {
            let len = t.patch().len();
            if len == 0 || len > cfg.max_batch {
                return fail("patch length outside [1, max_batch]");
            }
            if !(t.genuinity >= 0.0) || t.maturity > cfg.m_max.max(cfg.m_init) {
                return fail("genuinity or maturity out of range");
            }
        }
    }
    Ok(())
}
