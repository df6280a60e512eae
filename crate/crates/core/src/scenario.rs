//! Synthetic range/bearing scenario: scripted targets seen by a sensor at
//! the origin, with Gaussian noise and Poisson clutter that is uniform in
//! range and azimuth.

use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, Violation};
use crate::rng::{stream, Stream};
use crate::tracklets::Point;

/// Constant-velocity leg, optionally turning at a constant rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionSegment {
    /// Length in steps; `None` runs until the target dies.
    #[serde(default)]
    pub steps: Option<usize>,
    /// Displacement per step at the start of the segment.
    pub velocity: Point,
    /// Rotation of the velocity per step, in radians.
    #[serde(default)]
    pub turn_rate: f64,
}

/// One scripted target. It exists on steps `birth_step..=death_step`
/// (steps are numbered from 1) and sits at `initial_position` on its
/// birth step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetScript {
    pub birth_step: usize,
    pub death_step: usize,
    pub initial_position: Point,
    pub segments: Vec<MotionSegment>,
}

impl TargetScript {
    pub fn is_alive(&self, step: usize) -> bool {
        (self.birth_step..=self.death_step).contains(&step)
    }

    /// Positions for every step of the target's life, birth first.
    pub fn trajectory(&self) -> Vec<Point> {
        let life = self.death_step.saturating_sub(self.birth_step) + 1;
        let mut out = Vec::with_capacity(life);
        let mut pos = self.initial_position;
        out.push(pos);
        let mut seg_idx = 0;
        let mut seg_elapsed = 0;
        let mut velocity = self.segments.first().map_or([0.0, 0.0], |s| s.velocity);
        while out.len() < life {
            if let Some(seg) = self.segments.get(seg_idx) {
                if seg.steps.is_some_and(|n| seg_elapsed >= n) && seg_idx + 1 < self.segments.len() {
                    seg_idx += 1;
                    seg_elapsed = 0;
                    velocity = self.segments[seg_idx].velocity;
                }
            }
            pos = [pos[0] + velocity[0], pos[1] + velocity[1]];
            out.push(pos);
            if let Some(seg) = self.segments.get(seg_idx) {
                if seg.turn_rate != 0.0 {
                    let (s, c) = seg.turn_rate.sin_cos();
                    velocity = [c * velocity[0] - s * velocity[1], s * velocity[0] + c * velocity[1]];
                }
            }
            seg_elapsed += 1;
        }
        out
    }

    pub fn position_at(&self, step: usize) -> Option<Point> {
        if !self.is_alive(step) {
            return None;
        }
        self.trajectory().get(step - self.birth_step).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorModel {
    /// Range noise standard deviation, scene units.
    pub sigma_r: f64,
    /// Bearing noise standard deviation, radians.
    pub sigma_theta: f64,
    pub detection_probability: f64,
    /// When false, measurements are exact.
    pub noise: bool,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            sigma_r: 10.0,
            sigma_theta: std::f64::consts::PI / 90.0,
            detection_probability: 1.0,
            noise: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClutterModel {
    /// Mean number of clutter points per step.
    pub lambda_c: f64,
    pub range_interval: [f64; 2],
    pub azimuth_interval: [f64; 2],
}

impl Default for ClutterModel {
    fn default() -> Self {
        ClutterModel {
            lambda_c: 20.0,
            range_interval: [0.0, 1414.0],
            azimuth_interval: [-std::f64::consts::PI, std::f64::consts::PI],
        }
    }
}

/// Range and bearing as seen from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub r: f64,
    pub theta: f64,
}

impl Polar {
    pub fn of(p: Point) -> Self {
        Polar {
            r: p[0].hypot(p[1]),
            theta: p[1].atan2(p[0]),
        }
    }
}

pub fn to_cartesian(polar: Polar) -> Point {
    let (s, c) = polar.theta.sin_cos();
    [polar.r * c, polar.r * s]
}

/// Noisy range/bearing of `p`; range is clamped at zero.
pub fn measure<R: Rng + ?Sized>(p: Point, sensor: &SensorModel, rng: &mut R) -> Result<Polar> {
    if p[0] == 0.0 && p[1] == 0.0 {
        return Err(Error::UndefinedBearing);
    }
    let mut polar = Polar::of(p);
    if sensor.noise {
        let range_noise = Normal::new(0.0, sensor.sigma_r).map_err(|e| Error::Config(e.to_string()))?;
        let bearing_noise = Normal::new(0.0, sensor.sigma_theta).map_err(|e| Error::Config(e.to_string()))?;
        polar.r = (polar.r + range_noise.sample(rng)).max(0.0);
        polar.theta += bearing_noise.sample(rng);
    }
    Ok(polar)
}

/// A complete scenario description, as stored in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub steps: usize,
    /// Targets must stay inside `[-half_extent, half_extent]²`.
    #[serde(default = "default_half_extent")]
    pub scene_half_extent: f64,
    pub targets: Vec<TargetScript>,
    #[serde(default)]
    pub sensor: SensorModel,
    #[serde(default)]
    pub clutter: ClutterModel,
}

fn default_half_extent() -> f64 {
    1000.0
}

impl ScenarioSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Ten staggered targets over 100 steps, the scenario shipped in
    /// `scenarios/default.json`.
    pub fn default_ten_targets() -> Self {
        serde_json::from_str(include_str!("../scenarios/default.json"))
            .expect("bundled scenario is valid JSON")
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.steps == 0 {
            out.push(Violation::new(&["scenario.steps"], "must be at least 1"));
        }
        let s = &self.sensor;
        if !(s.sigma_r > 0.0) {
            out.push(Violation::new(&["scenario.sensor.sigma_r"], "must be positive"));
        }
        if !(s.sigma_theta > 0.0) {
            out.push(Violation::new(&["scenario.sensor.sigma_theta"], "must be positive"));
        }
        if !(0.0..=1.0).contains(&s.detection_probability) {
            out.push(Violation::new(
                &["scenario.sensor.detection_probability"],
                "must lie in [0, 1]",
            ));
        }
        let c = &self.clutter;
        if !(c.lambda_c >= 0.0 && c.lambda_c.is_finite()) {
            out.push(Violation::new(&["scenario.clutter.lambda_c"], "must be a finite non-negative number"));
        }
        if !(c.range_interval[0] >= 0.0 && c.range_interval[0] < c.range_interval[1]) {
            out.push(Violation::new(&["scenario.clutter.range_interval"], "must be a non-empty interval starting at or above 0"));
        }
        if !(c.azimuth_interval[0] < c.azimuth_interval[1]) {
            out.push(Violation::new(&["scenario.clutter.azimuth_interval"], "must be a non-empty interval"));
        }
        for (k, t) in self.targets.iter().enumerate() {
            let field = format!("scenario.targets[{k}]");
            if t.birth_step >= t.death_step {
                out.push(Violation {
                    fields: vec![format!("{field}.birth_step"), format!("{field}.death_step")],
                    message: "birth_step must be before death_step".into(),
                });
                continue;
            }
            if t.segments.is_empty() {
                out.push(Violation {
                    fields: vec![format!("{field}.segments")],
                    message: "at least one motion segment is required".into(),
                });
                continue;
            }
            let h = self.scene_half_extent;
            if let Some(p) = t.trajectory().iter().find(|p| p[0].abs() > h || p[1].abs() > h) {
                out.push(Violation {
                    fields: vec![field.clone()],
                    message: format!("leaves the scene at ({:.1}, {:.1})", p[0], p[1]),
                });
            }
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

    /// Digest of everything except the clutter model, so that runs that
    /// differ only in clutter share it.
    pub fn hash(&self) -> String {
        let stable = serde_json::json!({
            "steps": self.steps,
            "scene_half_extent": self.scene_half_extent,
            "targets": self.targets,
            "sensor": self.sensor,
        });
        hex::encode(Sha256::digest(stable.to_string().as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Truth {
    pub target: usize,
    pub position: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    /// Index of the generating target, `None` for clutter.
    pub source: Option<usize>,
    pub position: Point,
    pub polar: Polar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioStep {
    pub step: usize,
    pub truths: Vec<Truth>,
    pub measurements: Vec<Measurement>,
}

impl ScenarioStep {
    pub fn truth_points(&self) -> Vec<Point> {
        self.truths.iter().map(|t| t.position).collect()
    }

    pub fn measurement_points(&self) -> Vec<Point> {
        self.measurements.iter().map(|m| m.position).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioTrace {
    pub steps: Vec<ScenarioStep>,
}

impl ScenarioTrace {
    /// CSV columns: `step,kind,target_id,x,y,r,theta`; clutter rows carry
    /// target_id −1, truth rows carry the exact polar coordinates.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACE_HEADER)?;
        for s in &self.steps {
            for t in &s.truths {
                let polar = Polar::of(t.position);
                w.write_record(&[
                    s.step.to_string(),
                    "truth".into(),
                    t.target.to_string(),
                    t.position[0].to_string(),
                    t.position[1].to_string(),
                    polar.r.to_string(),
                    polar.theta.to_string(),
                ])?;
            }
            for m in &s.measurements {
                w.write_record(&[
                    s.step.to_string(),
                    "meas".into(),
                    m.source.map_or("-1".to_string(), |k| k.to_string()),
                    m.position[0].to_string(),
                    m.position[1].to_string(),
                    m.polar.r.to_string(),
                    m.polar.theta.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub const TRACE_HEADER: [&str; 7] = ["step", "kind", "target_id", "x", "y", "r", "theta"];

/// Simulates `spec.steps` steps. Detection, noise, clutter and shuffling
/// each draw from their own stream of `seed`.
pub fn generate(spec: &ScenarioSpec, seed: u64) -> Result<ScenarioTrace> {
    spec.validate()?;
    let mut noise_rng = stream(seed, Stream::Noise);
    let mut clutter_rng = stream(seed, Stream::Clutter);
    let mut shuffle_rng = stream(seed, Stream::Shuffle);
    let mut detect_rng = stream(seed, Stream::Detection);

    let trajectories: Vec<Vec<Point>> = spec.targets.iter().map(TargetScript::trajectory).collect();
    let clutter = &spec.clutter;
    let poisson = if clutter.lambda_c > 0.0 {
        Some(Poisson::new(clutter.lambda_c).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };

    let mut steps = Vec::with_capacity(spec.steps);
    for step in 1..=spec.steps {
        let mut truths = Vec::new();
        let mut measurements = Vec::new();
        for (k, (script, traj)) in spec.targets.iter().zip(&trajectories).enumerate() {
            if !script.is_alive(step) {
                continue;
            }
            let position = traj[step - script.birth_step];
            truths.push(Truth { target: k, position });
            let detected = detect_rng.random::<f64>() < spec.sensor.detection_probability;
            if detected {
                let polar = measure(position, &spec.sensor, &mut noise_rng)?;
                measurements.push(Measurement {
                    source: Some(k),
                    position: to_cartesian(polar),
                    polar,
                });
            }
        }
        let count = poisson.as_ref().map_or(0, |p| p.sample(&mut clutter_rng) as usize);
        for _ in 0..count {
            let polar = Polar {
                r: clutter_rng.random_range(clutter.range_interval[0]..clutter.range_interval[1]),
                theta: clutter_rng.random_range(clutter.azimuth_interval[0]..clutter.azimuth_interval[1]),
            };
            measurements.push(Measurement {
                source: None,
                position: to_cartesian(polar),
                polar,
            });
        }
        measurements.shuffle(&mut shuffle_rng);
        steps.push(ScenarioStep {
            step,
            truths,
            measurements,
        });
    }
    Ok(ScenarioTrace { steps })
}
