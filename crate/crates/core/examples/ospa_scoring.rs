//! Scores an estimate set against ground truth with OSPA and shows the
//! optimal assignment behind the localization term.

use lstm_mtf::ospa::{hungarian, ospa, OspaConfig};

fn main() -> lstm_mtf::Result<()> {
    let truth = [[0.0, 0.0], [100.0, 50.0], [-300.0, 220.0]];
    let estimates = [[4.0, -3.0], [96.0, 52.0], [-290.0, 215.0], [600.0, 600.0]];

    for c in [100.0, 20.0] {
        let cfg = OspaConfig { p: 1.0, c };
        let r = ospa(&estimates, &truth, &cfg)?;
        println!("c={c:>5}: total {:.3} = loc {:.3} + card {:.3}", r.total, r.loc, r.card);
    }

    let costs: Vec<Vec<f64>> = truth
        .iter()
        .map(|t| estimates.iter().map(|e| (t[0] - e[0]).hypot(t[1] - e[1])).collect())
        .collect();
    let a = hungarian(&costs)?;
    for (i, j) in a.row_to_col.iter().enumerate() {
        println!("truth {i} ↔ estimate {j}  ({:.2})", costs[i][*j]);
    }
    println!("assignment cost {:.3}", a.cost);
    Ok(())
}
