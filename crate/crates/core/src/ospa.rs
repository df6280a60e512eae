//! OSPA distance between finite point sets, with an exact rectangular
//! Hungarian solver for the optimal sub-pattern assignment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OspaConfig {
    /// Order, ≥ 1.
    pub p: f64,
    /// Cut-off, > 0.
    pub c: f64,
}

impl Default for OspaConfig {
    fn default() -> Self {
        OspaConfig { p: 1.0, c: 100.0 }
    }
}

impl OspaConfig {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.p >= 1.0 && self.p.is_finite()) {
            out.push(Violation::new(&["ospa.p"], "order must be a finite number ≥ 1"));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            out.push(Violation::new(&["ospa.c"], "cut-off must be positive and finite"));
        }
        out
    }
}

/// OSPA total with its localization and cardinality components.
///
/// For `p = 1` the components add up to the total. For other orders each
/// component is reported as its own `1/p` power and `additive` is false.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OspaResult {
    pub total: f64,
    pub loc: f64,
    pub card: f64,
    pub additive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// Column assigned to each row.
    pub row_to_col: Vec<usize>,
    pub cost: f64,
}

fn check_costs(costs: &[Vec<f64>]) -> Result<usize> {
    let cols = costs.first().map_or(0, Vec::len);
    if let Some(bad) = costs.iter().find(|r| r.len() != cols) {
        return Err(Error::Shape {
            what: "cost matrix row",
            expected: cols,
            found: bad.len(),
        });
    }
    if costs.len() > cols {
        return Err(Error::Shape {
            what: "assignment columns (transpose so rows ≤ columns)",
            expected: costs.len(),
            found: cols,
        });
    }
    if costs.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Config("assignment costs must be finite".into()));
    }
    Ok(cols)
}

/// Shortest-augmenting-path Hungarian method with row/column potentials,
/// O(rows² · cols). `allowed[j] == false` removes column `j`.
fn solve(costs: &[Vec<f64>], rows: &[usize], allowed: &[bool]) -> (Vec<usize>, f64) {
    let cols: Vec<usize> = (0..allowed.len()).filter(|&j| allowed[j]).collect();
    let n = rows.len();
    let m = cols.len();
    debug_assert!(n <= m);
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let a = |i: usize, j: usize| costs[rows[i - 1]][cols[j - 1]];

    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = cols[j - 1];
        }
    }
    let cost = row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[rows[i]][j])
        .sum();
    (row_to_col, cost)
}

/// Minimum-cost injection of rows into columns (`rows ≤ columns`).
///
/// Among optimal assignments the lexicographically smallest one (compared
/// row by row on column index) is returned.
pub fn hungarian(costs: &[Vec<f64>]) -> Result<Assignment> {
    let cols = check_costs(costs)?;
    let n = costs.len();
    let all_rows: Vec<usize> = (0..n).collect();
    let (_, optimum) = solve(costs, &all_rows, &vec![true; cols]);
    let tol = 1e-10 * optimum.abs().max(1.0);

    // Fix rows in order to the smallest column that still admits an optimum.
    let mut allowed = vec![true; cols];
    let mut fixed_cost = 0.0;
    let mut row_to_col = Vec::with_capacity(n);
    for i in 0..n {
        let rest: Vec<usize> = (i + 1..n).collect();
        let mut chosen = None;
        for j in 0..cols {
            if !allowed[j] {
                continue;
            }
            allowed[j] = false;
            let (_, sub) = solve(costs, &rest, &allowed);
            allowed[j] = true;
            if fixed_cost + costs[i][j] + sub <= optimum + tol {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.expect("some column always completes an optimal assignment");
        allowed[j] = false;
        fixed_cost += costs[i][j];
        row_to_col.push(j);
    }
    let cost = row_to_col.iter().enumerate().fold(0.0, |acc, (i, &j)| acc + costs[i][j]);
    Ok(Assignment { row_to_col, cost })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// OSPA distance of order `cfg.p` with cut-off `cfg.c`.
pub fn ospa<P: AsRef<[f64]>>(a: &[P], b: &[P], cfg: &OspaConfig) -> Result<OspaResult> {
    let dim = a.iter().chain(b).next().map_or(0, |p| p.as_ref().len());
    if let Some(bad) = a.iter().chain(b).find(|p| p.as_ref().len() != dim) {
        return Err(Error::Shape {
            what: "point dimension",
            expected: dim,
            found: bad.as_ref().len(),
        });
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (alpha, beta) = (small.len(), large.len());
    let additive = cfg.p == 1.0;
    if beta == 0 {
        return Ok(OspaResult {
            total: 0.0,
            loc: 0.0,
            card: 0.0,
            additive,
        });
    }

    let costs: Vec<Vec<f64>> = small
        .iter()
        .map(|x| {
            large
                .iter()
                .map(|y| euclidean(x.as_ref(), y.as_ref()).min(cfg.c).powf(cfg.p))
                .collect()
        })
        .collect();
    let cost = hungarian(&costs)?.cost;
    let n = beta as f64;
    let card_term = cfg.c.powf(cfg.p) * (beta - alpha) as f64;
    let result = if additive {
        OspaResult {
            total: (card_term + cost) / n,
            loc: cost / n,
            card: card_term / n,
            additive,
        }
    } else {
        let inv = 1.0 / cfg.p;
        OspaResult {
            total: ((card_term + cost) / n).powf(inv),
            loc: (cost / n).powf(inv),
            card: (card_term / n).powf(inv),
            additive,
        }
    };
    Ok(result)
}
