//! Experiment harness: seeded runs and clutter sweeps scored with OSPA,
//! written as CSV series and JSON summaries.
//!
//! Every run ("cell") is identified by its clutter rate and seed and writes
//! into `<out_dir>/lambda-<λ>_seed-<seed>/`:
//!
//! | file          | columns                                     |
//! |---------------|---------------------------------------------|
//! | `trace.csv`   | `step,kind,target_id,x,y,r,theta`           |
//! | `tracks.csv`  | `step,id,x,y,m,g,f,is_estimate`             |
//! | `ospa.csv`    | `step,total,loc,card`                       |
//! | `summary.json`| [`SummaryRecord`]                           |
//!
//! A sweep additionally writes `sweep.csv` (one row per cell, columns in
//! [`SWEEP_HEADER`]) and `sweep_curve.csv` (`lambda_c,mean_total`, the
//! seed-averaged curve).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::lstm::{LstmShape, TrainConfig};
use crate::ospa::{ospa, OspaConfig, OspaResult};
use crate::pipeline::{run, RunResult};
use crate::scenario::{generate, ScenarioSpec, ScenarioTrace};
use crate::tracklets::AssociationConfig;

pub const OSPA_HEADER: [&str; 4] = ["step", "total", "loc", "card"];
pub const SWEEP_HEADER: [&str; 10] = [
    "lambda_c",
    "seed",
    "scenario_hash",
    "mean_total",
    "std_total",
    "mean_loc",
    "std_loc",
    "mean_card",
    "std_card",
    "status",
];

/// Everything needed to reproduce a set of runs.
///
/// `scenario` is resolved relative to the config file; when absent the
/// bundled ten-target scenario is used. An empty `lambda_c` list keeps the
/// scenario's own clutter rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub scenario: Option<PathBuf>,
    pub association: AssociationConfig,
    pub training: TrainConfig,
    pub network: LstmShape,
    pub ospa: OspaConfig,
    pub lambda_c: Vec<f64>,
    pub seeds: Vec<u64>,
    pub steps: Option<usize>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: None,
            association: AssociationConfig::default(),
            training: TrainConfig::default(),
            network: LstmShape::default(),
            ospa: OspaConfig::default(),
            lambda_c: vec![20.0],
            seeds: vec![1],
            steps: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seeds: Option<Vec<u64>>,
    pub lambda_c: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(rel) = cfg.scenario.as_ref().filter(|p| p.is_relative()) {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.scenario = Some(base.join(rel));
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(s) = o.seeds {
            self.seeds = s;
        }
        if let Some(l) = o.lambda_c {
            self.lambda_c = l;
        }
        if o.steps.is_some() {
            self.steps = o.steps;
        }
        if let Some(d) = o.out_dir {
            self.out_dir = d;
        }
    }

    /// The scenario with the step override applied.
    pub fn scenario_spec(&self) -> Result<ScenarioSpec> {
        let mut spec = match &self.scenario {
            Some(p) => ScenarioSpec::load(p)?,
            None => ScenarioSpec::default_ten_targets(),
        };
        if let Some(steps) = self.steps {
            spec.steps = steps;
        }
        Ok(spec)
    }

    pub fn lambdas(&self, spec: &ScenarioSpec) -> Vec<f64> {
        if self.lambda_c.is_empty() {
            vec![spec.clutter.lambda_c]
        } else {
            self.lambda_c.clone()
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.association.violations();
        out.extend(self.training.violations());
        out.extend(self.ospa.violations());
        if self.seeds.is_empty() {
            out.push(Violation::new(&["seeds"], "at least one seed is required"));
        }
        for (k, l) in self.lambda_c.iter().enumerate() {
            if !(*l >= 0.0 && l.is_finite()) {
                out.push(Violation {
                    fields: vec![format!("lambda_c[{k}]")],
                    message: "clutter rate must be finite and non-negative".into(),
                });
            }
        }
        let n = &self.network;
        if n.input_size != 2 || n.output_size != 2 {
            out.push(Violation::new(
                &["network.input_size", "network.output_size"],
                "planar tracking needs 2 inputs and 2 outputs",
            ));
        }
        if n.hidden_size == 0 || n.num_layers == 0 {
            out.push(Violation::new(
                &["network.hidden_size", "network.num_layers"],
                "must be positive",
            ));
        }
        if self.steps == Some(0) {
            out.push(Violation::new(&["steps"], "must be at least 1"));
        }
        match self.scenario_spec() {
            Ok(spec) => out.extend(spec.violations()),
            Err(e) => out.push(Violation::new(&["scenario"], e.to_string())),
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Flattened `path = value` listing of the effective configuration.
    pub fn parameter_table(&self) -> Vec<(String, String)> {
        fn walk(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
            match v {
                serde_json::Value::Object(map) => {
                    for (k, child) in map {
                        let path = if prefix.is_empty() {
                            k.clone()
                        } else {
                            format!("{prefix}.{k}")
                        };
                        walk(&path, child, out);
                    }
                }
                other => out.push((prefix.to_string(), other.to_string())),
            }
        }
        let mut out = Vec::new();
        let value = serde_json::to_value(self).expect("config serializes");
        walk("", &value, &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OspaRow {
    pub step: usize,
    pub total: f64,
    pub loc: f64,
    pub card: f64,
}

/// Per-run statistics over all steps (population standard deviation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub lambda_c: f64,
    pub seed: u64,
    pub steps: usize,
    pub scenario_hash: String,
    pub mean_total: f64,
    pub std_total: f64,
    pub mean_loc: f64,
    pub std_loc: f64,
    pub mean_card: f64,
    pub std_card: f64,
    pub series: Vec<OspaRow>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl SummaryRecord {
    pub fn from_series(lambda_c: f64, seed: u64, scenario_hash: String, series: Vec<OspaRow>) -> Self {
        let col = |f: fn(&OspaRow) -> f64| series.iter().map(f).collect::<Vec<_>>();
        let (mean_total, std_total) = mean_std(&col(|r| r.total));
        let (mean_loc, std_loc) = mean_std(&col(|r| r.loc));
        let (mean_card, std_card) = mean_std(&col(|r| r.card));
        SummaryRecord {
            lambda_c,
            seed,
            steps: series.len(),
            scenario_hash,
            mean_total,
            std_total,
            mean_loc,
            std_loc,
            mean_card,
            std_card,
            series,
        }
    }
}

/// In-memory result of one (λ_c, seed) run.
#[derive(Clone, Debug)]
pub struct CellResult {
    pub trace: ScenarioTrace,
    pub run: RunResult,
    pub summary: SummaryRecord,
}

/// Scores every step's reported estimates against the ground truth.
pub fn score(run: &RunResult, cfg: &OspaConfig) -> Result<Vec<OspaRow>> {
    run.steps
        .iter()
        .map(|s| {
            let positions: Vec<_> = s.estimates.iter().map(|e| e.position).collect();
            let OspaResult { total, loc, card, .. } = ospa(&positions, &s.truths, cfg)?;
            Ok(OspaRow {
                step: s.step,
                total,
                loc,
                card,
            })
        })
        .collect()
}

/// Simulates, filters and scores one cell without touching the filesystem.
pub fn run_cell(cfg: &ExperimentConfig, spec: &ScenarioSpec, lambda_c: f64, seed: u64) -> Result<CellResult> {
    let mut spec = spec.clone();
    spec.clutter.lambda_c = lambda_c;
    let trace = generate(&spec, seed)?;
    let result = run(&trace, &cfg.association, &cfg.training, cfg.network, seed)?;
    let series = score(&result, &cfg.ospa)?;
    let summary = SummaryRecord::from_series(lambda_c, seed, spec.hash(), series);
    Ok(CellResult {
        trace,
        run: result,
        summary,
    })
}

pub fn cell_dir(out_dir: &Path, lambda_c: f64, seed: u64) -> PathBuf {
    out_dir.join(format!("lambda-{lambda_c}_seed-{seed}"))
}

/// Writes to a sibling temporary file, then renames over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn ospa_csv(series: &[OspaRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(OSPA_HEADER)?;
    for r in series {
        w.write_record(&[
            r.step.to_string(),
            r.total.to_string(),
            r.loc.to_string(),
            r.card.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_cell(dir: &Path, cell: &CellResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut trace = Vec::new();
    cell.trace.write_csv(&mut trace)?;
    write_atomic(&dir.join("trace.csv"), &trace)?;
    let mut tracks = Vec::new();
    cell.run.write_tracks_csv(&mut tracks)?;
    write_atomic(&dir.join("tracks.csv"), &tracks)?;
    write_atomic(&dir.join("ospa.csv"), &ospa_csv(&cell.summary.series)?)?;
    let mut json = serde_json::to_vec_pretty(&cell.summary)?;
    json.push(b'\n');
    write_atomic(&dir.join("summary.json"), &json)?;
    Ok(())
}

/// Runs every seed at a single clutter rate and writes each cell.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Vec<SummaryRecord>> {
    cfg.validate()?;
    let spec = cfg.scenario_spec()?;
    let lambdas = cfg.lambdas(&spec);
    let [lambda_c] = lambdas[..] else {
        return Err(Error::Invalid(vec![Violation::new(
            &["lambda_c"],
            "run takes exactly one clutter rate; use sweep for several",
        )]));
    };
    let mut out = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let cell = run_cell(cfg, &spec, lambda_c, seed)?;
        write_cell(&cell_dir(&cfg.out_dir, lambda_c, seed), &cell)?;
        out.push(cell.summary);
    }
    Ok(out)
}

#[derive(Debug)]
pub struct SweepRow {
    pub lambda_c: f64,
    pub seed: u64,
    pub scenario_hash: String,
    pub outcome: std::result::Result<SummaryRecord, Error>,
}

#[derive(Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.outcome.is_err())
    }

    /// Seed-averaged mean total OSPA per clutter rate, over successful cells.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        let mut lambdas: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !lambdas.contains(&r.lambda_c) {
                lambdas.push(r.lambda_c);
            }
        }
        lambdas
            .into_iter()
            .filter_map(|l| {
                let totals: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.lambda_c == l)
                    .filter_map(|r| r.outcome.as_ref().ok().map(|s| s.mean_total))
                    .collect();
                (!totals.is_empty()).then(|| (l, mean_std(&totals).0))
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SWEEP_HEADER)?;
        for r in &self.rows {
            let mut rec = vec![r.lambda_c.to_string(), r.seed.to_string(), r.scenario_hash.clone()];
            match &r.outcome {
                Ok(s) => {
                    for v in [s.mean_total, s.std_total, s.mean_loc, s.std_loc, s.mean_card, s.std_card] {
                        rec.push(v.to_string());
                    }
                    rec.push("ok".into());
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 6));
                    rec.push(format!("error: {e}"));
                }
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn curve_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lambda_c", "mean_total"])?;
        for (l, m) in self.curve() {
            w.write_record(&[l.to_string(), m.to_string()])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// Runs every (λ_c, seed) cell; a failing cell is recorded, not fatal.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let spec = cfg.scenario_spec()?;
    let hash = spec.hash();
    let mut rows = Vec::new();
    for lambda_c in cfg.lambdas(&spec) {
        for &seed in &cfg.seeds {
            let outcome = run_cell(cfg, &spec, lambda_c, seed).and_then(|cell| {
                write_cell(&cell_dir(&cfg.out_dir, lambda_c, seed), &cell)?;
                Ok(cell.summary)
            });
            rows.push(SweepRow {
                lambda_c,
                seed,
                scenario_hash: hash.clone(),
                outcome,
            });
        }
    }
    let report = SweepReport { rows };
    fs::create_dir_all(&cfg.out_dir)?;
    write_atomic(&cfg.out_dir.join("sweep.csv"), &report.to_csv()?)?;
    write_atomic(&cfg.out_dir.join("sweep_curve.csv"), &report.curve_csv()?)?;
    Ok(report)
}

#[derive(Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub parameters: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn cmd_validate(cfg: &ExperimentConfig) -> ValidationReport {
    ValidationReport {
        violations: cfg.violations(),
        parameters: cfg.parameter_table(),
    }
}
