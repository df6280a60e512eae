//! Tracklet tuples: a target's recent position patch together with its
//! maturity, genuinity error and freeze flag.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Planar position in scene units.
pub type Point = [f64; 2];

pub fn distance(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Thresholds driving association and the tuple lifecycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssociationConfig {
    /// Maturity at which an unassociated target is treated as occluded
    /// rather than dropped, and from which estimates are reported.
    pub m_min: i32,
    /// Maturity given to a newborn tuple.
    pub m_init: i32,
    /// Distances below this count as a confirmed association.
    pub g_min: f64,
    /// Distances above this are never trusted; measurements farther than
    /// this from every prediction become births.
    pub g_max: f64,
    /// Maximum number of rows kept in a patch.
    pub max_batch: usize,
    /// Maturity ceiling.
    pub m_max: i32,
    /// A tuple whose maturity falls below this is removed.
    pub death_floor: i32,
}

impl Default for AssociationConfig {
    fn default() -> Self {
        AssociationConfig {
            m_min: 2,
            m_init: 2,
            g_min: 50.0,
            g_max: 100.0,
            max_batch: 10,
            m_max: 10,
            death_floor: 0,
        }
    }
}

impl AssociationConfig {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.g_min > 0.0) {
            out.push(Violation::new(&["association.g_min"], "must be positive"));
        }
        if !(self.g_min < self.g_max) {
            out.push(Violation::new(
                &["association.g_min", "association.g_max"],
                format!("g_min ({}) must be smaller than g_max ({})", self.g_min, self.g_max),
            ));
        }
        if self.m_min < 0 {
            out.push(Violation::new(&["association.m_min"], "must be non-negative"));
        }
        if self.m_init < self.m_min {
            out.push(Violation::new(
                &["association.m_init", "association.m_min"],
                "m_init must be at least m_min",
            ));
        }
        if self.death_floor >= self.m_min {
            out.push(Violation::new(
                &["association.death_floor", "association.m_min"],
                "death_floor must be below m_min",
            ));
        }
        if self.m_min > self.m_max {
            out.push(Violation::new(
                &["association.m_min", "association.m_max"],
                "m_min must not exceed m_max",
            ));
        }
        if self.max_batch == 0 {
            out.push(Violation::new(&["association.max_batch"], "must be at least 1"));
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
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TargetId(pub u64);

impl std::fmt::Display for TargetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackletTuple {
    id: TargetId,
    patch: VecDeque<Point>,
    pub maturity: i32,
    pub genuinity: f64,
    pub frozen: bool,
}

impl TrackletTuple {
    /// New tuple from an unassociated measurement.
    pub fn birth(z: Point, cfg: &AssociationConfig, id: TargetId) -> Self {
        let mut patch = VecDeque::with_capacity(cfg.max_batch + 1);
        patch.push_back(z);
        TrackletTuple {
            id,
            patch,
            maturity: cfg.m_init,
            genuinity: 0.0,
            frozen: false,
        }
    }

    pub fn id(&self) -> TargetId {
        self.id
    }

    /// Patch rows, oldest first.
    pub fn patch(&self) -> &VecDeque<Point> {
        &self.patch
    }

    pub fn rows(&self) -> Vec<Point> {
        self.patch.iter().copied().collect()
    }

    pub fn newest(&self) -> Point {
        *self.patch.back().expect("a tuple always holds at least one row")
    }

    /// Appends `row` as newest, dropping the oldest row beyond `max_batch`.
    pub fn append_row(&mut self, row: Point, cfg: &AssociationConfig) {
        self.patch.push_back(row);
        while self.patch.len() > cfg.max_batch.max(1) {
            self.patch.pop_front();
        }
    }

    /// Associated with measurement `z`: unfreeze, gain maturity, append `z`.
    pub fn apply_survival(&mut self, z: Point, g_new: f64, cfg: &AssociationConfig) {
        self.frozen = false;
        self.maturity = (self.maturity + 1).min(cfg.m_max);
        self.genuinity = g_new;
        self.append_row(z, cfg);
    }

    /// No trusted measurement: freeze, lose maturity, append the prediction.
    pub fn apply_freeze(&mut self, x_hat: Point, cfg: &AssociationConfig) {
        self.frozen = true;
        self.maturity -= 1;
        self.append_row(x_hat, cfg);
    }

    pub fn is_dead(&self, cfg: &AssociationConfig) -> bool {
        self.maturity < cfg.death_floor
    }

    pub fn is_mature(&self, cfg: &AssociationConfig) -> bool {
        self.maturity >= cfg.m_min
    }
}
