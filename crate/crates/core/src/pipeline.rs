//! One filtering cycle per time step: fine-tune the shared motion model on
//! each target's patch and predict, build residuals against the new
//! measurements, associate, update, drop dead tuples and add births.

use std::io::Write;

use serde::Serialize;

use crate::association::{associate, AssociationOutcome, ResidualGrid};
use crate::error::{Error, Result};
use crate::lstm::{predict_next, train_online, AdamState, LstmParams, LstmShape, TrainConfig};
use crate::rng::{stream, Stream};
use crate::scenario::ScenarioTrace;
use crate::tracklets::{AssociationConfig, Point, TargetId, TrackletTuple};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub id: TargetId,
    pub position: Point,
}

/// Live tuples (sorted by id) and the globally shared network weights.
#[derive(Clone, Debug)]
pub struct FilterState {
    pub targets: Vec<TrackletTuple>,
    pub params: LstmParams,
    next_id: u64,
    step: usize,
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub step: usize,
    /// Network prediction for every tuple alive at the start of the step.
    pub predictions: Vec<(TargetId, Point)>,
    /// Indices refer to the tuples alive at the start of the step and to
    /// the step's measurements.
    pub outcome: AssociationOutcome,
    /// Newest row of every mature tuple after the update, excluding the
    /// tuples born in this step.
    pub estimates: Vec<Estimate>,
}

impl FilterState {
    pub fn new(params: LstmParams) -> Self {
        FilterState {
            targets: Vec::new(),
            params,
            next_id: 0,
            step: 0,
        }
    }

    /// Fresh state with Glorot-initialized weights from the seed's weight stream.
    pub fn seeded(shape: LstmShape, seed: u64) -> Self {
        Self::new(LstmParams::glorot(shape, &mut stream(seed, Stream::Weights)))
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Fine-tunes the shared weights on the target's patch (when it has at
    /// least two rows), writes them back, and predicts its next position.
    fn predict(&mut self, index: usize, train: &TrainConfig) -> Result<Point> {
        let target = &self.targets[index];
        let id = target.id();
        let (rows, origin) = train.normalize(&target.rows());
        let mut adam = AdamState::new(&self.params, train.adam);
        train_online(&mut self.params, &mut adam, &rows, train).map_err(|e| match e {
            Error::NonFiniteLoss { epoch } => Error::TargetDiverged {
                id: id.0,
                reason: format!("non-finite training loss at epoch {epoch}"),
            },
            other => other,
        })?;
        let y = predict_next(&self.params, &rows)?;
        let x_hat = train.denormalize(&y, origin);
        if !x_hat.iter().all(|v| v.is_finite()) {
            return Err(Error::TargetDiverged {
                id: id.0,
                reason: "non-finite prediction".into(),
            });
        }
        Ok(x_hat)
    }

    /// Advances the filter by one step with measurement set `z`.
    pub fn step(&mut self, z: &[Point], assoc: &AssociationConfig, train: &TrainConfig) -> Result<StepReport> {
        assoc.validate()?;
        train.validate()?;
        if z.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("measurements must be finite".into()));
        }
        self.step += 1;

        let mut x_hats = Vec::with_capacity(self.targets.len());
        for k in 0..self.targets.len() {
            x_hats.push(self.predict(k, train)?);
        }

        let grid = ResidualGrid::build(&x_hats, z);
        let maturities: Vec<i32> = self.targets.iter().map(|t| t.maturity).collect();
        let mut outcome = associate(&grid, &maturities, assoc);

        for s in &outcome.survivals {
            self.targets[s.target].apply_survival(z[s.measurement], s.genuinity, assoc);
        }
        for f in &outcome.freezes {
            self.targets[f.target].apply_freeze(x_hats[f.target], assoc);
        }
        outcome.deaths = outcome
            .freezes
            .iter()
            .map(|f| f.target)
            .filter(|&k| self.targets[k].is_dead(assoc))
            .collect();
        outcome.freezes.retain(|f| !outcome.deaths.contains(&f.target));

        let predictions = self.targets.iter().map(TrackletTuple::id).zip(x_hats).collect();

        self.targets.retain(|t| !t.is_dead(assoc));
        // Newborns are reported from their first surviving step onward.
        let estimates = self
            .targets
            .iter()
            .filter(|t| t.is_mature(assoc))
            .map(|t| Estimate {
                id: t.id(),
                position: t.newest(),
            })
            .collect();
        for &n in &outcome.births {
            self.targets
                .push(TrackletTuple::birth(z[n], assoc, TargetId(self.next_id)));
            self.next_id += 1;
        }
        Ok(StepReport {
            step: self.step,
            predictions,
            outcome,
            estimates,
        })
    }
}

/// Snapshot of one tuple after a step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackRecord {
    pub id: TargetId,
    pub position: Point,
    pub maturity: i32,
    pub genuinity: f64,
    pub frozen: bool,
    pub is_estimate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunStep {
    pub step: usize,
    pub truths: Vec<Point>,
    pub estimates: Vec<Estimate>,
    pub tracks: Vec<TrackRecord>,
    pub births: usize,
    pub deaths: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub steps: Vec<RunStep>,
}

pub const TRACKS_HEADER: [&str; 8] = ["step", "id", "x", "y", "m", "g", "f", "is_estimate"];

impl RunResult {
    pub fn write_tracks_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACKS_HEADER)?;
        for s in &self.steps {
            for t in &s.tracks {
                w.write_record(&[
                    s.step.to_string(),
                    t.id.to_string(),
                    t.position[0].to_string(),
                    t.position[1].to_string(),
                    t.maturity.to_string(),
                    t.genuinity.to_string(),
                    u8::from(t.frozen).to_string(),
                    u8::from(t.is_estimate).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the filter over every step of `trace` from a freshly seeded state.
pub fn run(
    trace: &ScenarioTrace,
    assoc: &AssociationConfig,
    train: &TrainConfig,
    shape: LstmShape,
    seed: u64,
) -> Result<RunResult> {
    if trace.steps.is_empty() {
        return Err(Error::Config("scenario has no steps".into()));
    }
    let mut state = FilterState::seeded(shape, seed);
    let mut steps = Vec::with_capacity(trace.steps.len());
    for s in &trace.steps {
        let report = state
            .step(&s.measurement_points(), assoc, train)
            .map_err(|e| Error::AtStep {
                step: s.step,
                source: Box::new(e),
            })?;
        let tracks = state
            .targets
            .iter()
            .map(|t| TrackRecord {
                id: t.id(),
                position: t.newest(),
                maturity: t.maturity,
                genuinity: t.genuinity,
                frozen: t.frozen,
                is_estimate: report.estimates.iter().any(|e| e.id == t.id()),
            })
            .collect();
        steps.push(RunStep {
            step: s.step,
            truths: s.truth_points(),
            estimates: report.estimates,
            tracks,
            births: report.outcome.births.len(),
            deaths: report.outcome.deaths.len(),
        });
    }
    Ok(RunResult { steps })
}
