//! Trajectory calibration and evaluation for 6-DoF tracking data.
//!
//! The crate covers the full chain used to assess headset tracking against a
//! robot or motion-capture reference:
//!
//! * [`geom`]: quaternion and rigid pose algebra, slerp, handedness and
//!   rotation-vector conversion.
//! * [`traj`]: trajectory container, TUM text I/O, dilution, resampling and
//!   timestamp association.
//! * [`sync`]: clock-offset estimation from matched axial position peaks.
//! * [`calib`]: hand-eye calibration (`A·X = X·B`) by the Tsai-Lenz and
//!   Daniilidis methods.
//! * [`replay`]: re-targeting a recorded head trajectory onto robot TCP
//!   poses and origin-normalizing trajectories for comparison.
//! * [`metrics`]: rigid Umeyama alignment and absolute pose error.
//! * [`synth`]: deterministic synthetic scenarios with known ground truth.
//!
//! Every numeric type is generic over [`Real`]; the aliases below fix the
//! scalar to `f64` (or `f32`) for the common case.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calib;
pub mod geom;
pub mod keyval;
pub mod metrics;
pub mod replay;
pub mod scalar;
pub mod sync;
pub mod synth;
pub mod traj;

mod error;

pub use error::Error;
pub use scalar::Real;

/// Double precision pose.
pub type Pose = geom::Pose<f64>;
/// Double precision unit quaternion.
pub type Quat = geom::Quat<f64>;
/// Double precision rotation vector.
pub type RotVec = geom::RotVec<f64>;
/// Double precision trajectory.
pub type Trajectory = traj::Trajectory<f64>;
/// Double precision stamped pose.
pub type TimedPose = traj::TimedPose<f64>;
/// Double precision hand-eye motion pair.
pub type MotionPair = calib::MotionPair<f64>;
/// Double precision hand-eye solution.
pub type HandEyeResult = calib::HandEyeResult<f64>;
/// Double precision replay configuration.
pub type ReplayConfig = replay::ReplayConfig<f64>;
/// Double precision synthetic scenario.
pub type Scenario = synth::Scenario<f64>;

/// Single precision pose.
pub type Pose32 = geom::Pose<f32>;
/// Single precision unit quaternion.
pub type Quat32 = geom::Quat<f32>;
/// Single precision trajectory.
pub type Trajectory32 = traj::Trajectory<f32>;
