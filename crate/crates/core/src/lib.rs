//! Lower bounds on the speed of hypothetical superluminal influences in a
//! preferred frame, and a Monte Carlo of the sidereal-day Bell test that
//! could detect them.
//!
//! The physics modules are generic over the scalar (`f32`/`f64`); the aliases
//! below fix it to `f64`. The simulation and analysis layers work in `f64`.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bound;
pub mod cli;
pub mod config;
pub mod correlation;
pub mod error;
pub mod io;
pub mod relativity;
mod scalar;
pub mod sim;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vector = relativity::Vec3<f64>;
pub type Event = relativity::SpacetimeEvent<f64>;
pub type Frame = relativity::PreferredFrameSpec<f64>;
pub type Geometry = relativity::ExperimentGeometry<f64>;
pub type TachyonSpeed = relativity::TachyonSpeed<f64>;
pub type BoundInputs = bound::BoundInputs<f64>;
pub type CurveInputs = bound::CurveInputs<f64>;
pub type BoundCurve = bound::BoundCurve<f64>;
pub type DriftBudget = bound::DriftBudget<f64>;
pub type EntangledState = correlation::EntangledState<f64>;
pub type Polarizer = correlation::PolarizerSetting<f64>;
pub type TachyonModel = correlation::TachyonModel<f64>;
pub type Joint = correlation::JointOutcomeDistribution<f64>;
