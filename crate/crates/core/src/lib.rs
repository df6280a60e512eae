//! Multi-target filtering with an online-trained LSTM motion model.
//!
//! Each live target keeps a short patch of its recent positions. At every
//! step a single shared LSTM is fine-tuned on each patch in turn and asked
//! for the next position; predictions are matched against the incoming
//! measurements through a residual grid, and a threshold rule decides
//! which targets survive, which are frozen on their own prediction, and
//! which measurements start new targets. Runs are scored with OSPA.
//!
//! Modules, bottom-up:
//!
//! - [`lstm`]: the recurrent network, BPTT gradients, Adam, online training
//! - [`tracklets`]: per-target tuples and their lifecycle
//! - [`association`]: residual grid and survival/freeze/birth decisions
//! - [`pipeline`]: the per-step filter and full runs
//! - [`scenario`]: range/bearing simulation with Poisson clutter
//! - [`ospa`]: OSPA metric and Hungarian assignment
//! - [`bench`]: seeded experiments, sweeps and their output files

pub mod association;
pub mod bench;
pub mod error;
pub mod lstm;
pub mod ospa;
pub mod pipeline;
pub mod rng;
pub mod scenario;
pub mod tracklets;

pub use error::{Error, Result};
pub use tracklets::{Point, TargetId};
