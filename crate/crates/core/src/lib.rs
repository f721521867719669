//! Joint-level muscle fatigue evaluation for manual tasks.
//!
//! The crate models a five-joint right arm, computes static joint torques from
//! tool loads, predicts endurance, fatigue and recovery of the loaded joints,
//! and searches working postures that balance fatigue against discomfort.
//!
//! - [`fatigue`]: capacity decay and recovery, endurance, work/rest schedules.
//! - [`strength`]: posture-dependent flexion strength and population spread.
//! - [`arm`]: kinematics, anthropometry and Newton-Euler torques.
//! - [`posture`]: stress and discomfort indices, distance sweep, Pareto front.
//! - [`scenario`] and [`report`]: scenario files in, tables out.

pub mod arm;
pub mod error;
pub mod exec;
pub mod fatigue;
pub mod posture;
pub mod report;
pub mod scenario;
pub mod strength;

pub use error::{Error, Result};
pub use exec::Execution;
