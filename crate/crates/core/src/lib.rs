//! Converts pose-landmark time series into a "sense of effort" vibration.
//!
//! The pipeline runs
//!
//! 1. [`trace_io`]: parse and validate a landmark trace, resample to a uniform grid;
//! 2. [`body_model`]: segment centers of gravity from landmark endpoints;
//! 3. [`dynamics`]: Savitzky-Golay accelerations, translational inverse
//!    dynamics over the segment tree, ground reaction force;
//! 4. [`haptics`]: force magnitude to effort by a power law, effort to
//!    vibration amplitude through a perceived-intensity model, and a
//!    200 Hz amplitude-modulated carrier written as 16-bit PCM.
//!
//! [`pipeline::run_pipeline`] chains these from files on disk.

pub mod body_model;
pub mod config;
pub mod dynamics;
mod error;
pub mod haptics;
pub mod pipeline;
pub mod plot;
pub mod trace_io;

pub use error::{Error, ErrorKind, Result};

/// 3-vector of `f64` used for positions, accelerations and forces.
pub type Vec3 = nalgebra::Vector3<f64>;
