use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use super::bptt::Workspace;
use super::params::LstmParams;
use crate::error::{Error, Result, Violation};

/// Coordinate frame of the rows fed to the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFrame {
    /// Scene coordinates divided by `scale`.
    Scene,
    /// Offsets from the patch's newest row, divided by `scale`. The network
    /// still outputs a position, but in a frame that moves with the target.
    Newest,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Adam updates per online training session.
    pub epochs: usize,
    /// Positions are divided by this before entering the network.
    pub scale: f64,
    pub frame: InputFrame,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            scale: 100.0,
            frame: InputFrame::Newest,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.epochs == 0 {
            out.push(Violation::new(&["training.epochs"], "must be at least 1"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            out.push(Violation::new(&["training.scale"], "must be a positive finite number"));
        }
        let a = &self.adam;
        if !(a.lr > 0.0 && a.lr.is_finite()) {
            out.push(Violation::new(&["training.adam.lr"], "must be positive"));
        }
        if !(0.0..1.0).contains(&a.beta1) {
            out.push(Violation::new(&["training.adam.beta1"], "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&a.beta2) {
            out.push(Violation::new(&["training.adam.beta2"], "must lie in [0, 1)"));
        }
        if !(a.epsilon > 0.0) {
            out.push(Violation::new(&["training.adam.epsilon"], "must be positive"));
        }
        out
    }

    /// Maps a patch into network coordinates; returns the rows and the
    /// origin to add back (after scaling) to a network output.
    pub fn normalize(&self, patch: &[[f64; 2]]) -> (Vec<[f64; 2]>, [f64; 2]) {
        let origin = match (self.frame, patch.last()) {
            (InputFrame::Newest, Some(last)) => *last,
            _ => [0.0, 0.0],
        };
        let rows = patch
            .iter()
            .map(|p| [(p[0] - origin[0]) / self.scale, (p[1] - origin[1]) / self.scale])
            .collect();
        (rows, origin)
    }

    pub fn denormalize(&self, y: &[f64], origin: [f64; 2]) -> [f64; 2] {
        [origin[0] + y[0] * self.scale, origin[1] + y[1] * self.scale]
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

/// What an online training session did.
#[derive(Clone, Debug, PartialEq)]
pub enum Training {
    /// Fewer than two rows: nothing to fit, parameters untouched.
    Skipped,
    /// `losses[e]` is the loss evaluated before the update of epoch `e`.
    Trained { losses: Vec<f64> },
}

impl Training {
    pub fn final_loss(&self) -> Option<f64> {
        match self {
            Training::Skipped => None,
            Training::Trained { losses } => losses.last().copied(),
        }
    }
}

/// Fine-tunes `params` on one normalized patch: `cfg.epochs` full-BPTT
/// gradient evaluations of the one-step-ahead MSE, one Adam update each.
pub fn train_online<R: AsRef<[f64]>>(
    params: &mut LstmParams,
    adam: &mut AdamState,
    rows: &[R],
    cfg: &TrainConfig,
) -> Result<Training> {
    cfg.validate()?;
    if rows.len() < 2 {
        return Ok(Training::Skipped);
    }
    let mut ws = Workspace::default();
    let mut grad = params.zeros_like();
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let loss = ws.loss_and_gradient(params, rows, &mut grad)?;
        if !loss.is_finite() || !grad.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        adam.step(params, &grad);
        losses.push(loss);
    }
    if !params.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: cfg.epochs });
    }
    Ok(Training::Trained { losses })
}
