//! Re-targeting a recorded head trajectory onto robot TCP poses, and
//! bringing ground-truth and headset trajectories to a shared origin.
//!
//! With `A = T_tcp_unity · T_unity_opti` fixed, every OptiTrack increment
//! `ΔO_i = O_0⁻¹ · O_i` maps to a TCP increment `ΔH_i = A · ΔO_i · A⁻¹` and
//! the target pose is `T_i = B · ΔH_i`, where `B` is the chosen start pose.

use thiserror::Error;

use crate::geom::{Handedness, Pose};
use crate::keyval::{format_pose_fields, KeyValError, KeyValues};
use crate::traj::{TimedPose, TrajError, Trajectory};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("expected a right-handed trajectory; convert it first")]
    WrongHandedness,
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Traj(#[from] TrajError),
}

/// Transforms and dilution used to build TCP targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayConfig<T: Real> {
    /// Initial TCP pose in the robot base frame.
    pub b_start: Pose<T>,
    /// TCP → Unity (Center Eye Anchor), from hand-eye calibration.
    pub t_tcp_unity: Pose<T>,
    /// Unity → OptiTrack rigid body, from hand-eye calibration.
    pub t_unity_opti: Pose<T>,
    pub dilution_k: usize,
    /// Waypoint spacing limit used by [`validate_waypoint_spacing`].
    pub eef_step_m: f64,
}

impl<T: Real> Default for ReplayConfig<T> {
    fn default() -> Self {
        Self {
            b_start: Pose::identity(),
            t_tcp_unity: Pose::identity(),
            t_unity_opti: Pose::identity(),
            dilution_k: 10,
            eef_step_m: 0.03,
        }
    }
}

impl<T: Real> ReplayConfig<T> {
    /// The fixed TCP → OptiTrack chain `A`.
    pub fn a_chain(&self) -> Pose<T> {
        self.t_tcp_unity.compose(&self.t_unity_opti)
    }
}

const CONFIG_KEYS: [&str; 5] = ["b_start", "t_tcp_unity", "t_unity_opti", "dilution_k", "eef_step_m"];

impl ReplayConfig<f64> {
    /// Parses the flat config: `b_start`, `t_tcp_unity`, `t_unity_opti` (seven
    /// fields each), `dilution_k` and `eef_step_m`. Missing keys take their
    /// defaults (identity transforms, `k = 10`, 0.03 m).
    pub fn from_text(text: &str) -> Result<Self, KeyValError> {
        let kv = KeyValues::parse(text)?;
        kv.expect_only(&CONFIG_KEYS)?;
        let d = Self::default();
        let cfg = Self {
            b_start: kv.pose("b_start")?.unwrap_or(d.b_start),
            t_tcp_unity: kv.pose("t_tcp_unity")?.unwrap_or(d.t_tcp_unity),
            t_unity_opti: kv.pose("t_unity_opti")?.unwrap_or(d.t_unity_opti),
            dilution_k: kv.parse_value("dilution_k", "a positive integer")?.unwrap_or(d.dilution_k),
            eef_step_m: kv.f64("eef_step_m")?.unwrap_or(d.eef_step_m),
        };
        if cfg.dilution_k == 0 {
            return Err(KeyValError::BadValue {
                key: "dilution_k".into(),
                value: "0".into(),
                expected: "a positive integer",
            });
        }
        if !(cfg.eef_step_m > 0.0) {
            return Err(KeyValError::BadValue {
                key: "eef_step_m".into(),
                value: cfg.eef_step_m.to_string(),
                expected: "a positive distance in meters",
            });
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        format!(
            "b_start={}\nt_tcp_unity={}\nt_unity_opti={}\ndilution_k={}\neef_step_m={}\n",
            format_pose_fields(&self.b_start),
            format_pose_fields(&self.t_tcp_unity),
            format_pose_fields(&self.t_unity_opti),
            self.dilution_k,
            self.eef_step_m
        )
    }
}

/// `A · ΔO_i · A⁻¹` for every increment.
pub fn conjugate_increments<T: Real>(deltas: &[Pose<T>], a_chain: &Pose<T>) -> Vec<Pose<T>> {
    let a_inv = a_chain.inverse();
    deltas
        .iter()
        .map(|d| a_chain.compose(d).compose(&a_inv))
        .collect()
}

/// TCP targets for a right-handed OptiTrack trajectory:
/// `T_i = B · T_tcp_unity · T_unity_opti · ΔO_i · T_unity_opti⁻¹ · T_tcp_unity⁻¹`
/// on the diluted source. Stamps are copied from the diluted samples.
pub fn compute_tcp_targets<T: Real>(
    opti: &Trajectory<T>,
    cfg: &ReplayConfig<T>,
) -> Result<Trajectory<T>, ReplayError> {
    if opti.is_empty() {
        return Err(ReplayError::EmptyTrajectory);
    }
    if opti.handedness() != Handedness::Right {
        return Err(ReplayError::WrongHandedness);
    }
    let diluted = opti.dilute(cfg.dilution_k)?;
    let deltas = diluted.increments_from_start()?;
    let left = cfg.b_start.compose(&cfg.t_tcp_unity).compose(&cfg.t_unity_opti);
    let right = cfg.t_unity_opti.inverse().compose(&cfg.t_tcp_unity.inverse());
    let samples = diluted
        .samples()
        .iter()
        .zip(&deltas)
        .map(|(s, d)| {
            // Skip the round trip through A·A⁻¹ so the first target is B itself.
            let target = if *d == Pose::identity() {
                cfg.b_start
            } else {
                left.compose(d).compose(&right)
            };
            TimedPose::new(s.stamp, target)
        })
        .collect();
    let mut out = Trajectory::new(samples, "robot_base", Handedness::Right)?;
    if let Some(hz) = diluted.nominal_rate_hz() {
        out = out.with_rate(hz);
    }
    Ok(out)
}

/// `GT_i = X⁻¹ · TCP_i` with `X` the first TCP pose, so `GT_0 = I`.
pub fn normalize_ground_truth<T: Real>(tcp: &Trajectory<T>) -> Result<Trajectory<T>, ReplayError> {
    let first = tcp.samples().first().ok_or(ReplayError::EmptyTrajectory)?;
    let x_inv = first.pose.inverse();
    Ok(tcp.map_poses(|i, p| if i == 0 { Pose::identity() } else { x_inv.compose(p) }))
}

/// `P_i = T_unity_tcp · Y⁻¹ · U_i · T_unity_tcp⁻¹` with `Y` the first
/// headset pose, so `P_0 = I`. The trajectory must already be right-handed.
pub fn normalize_estimate<T: Real>(
    unity_rhs: &Trajectory<T>,
    t_unity_tcp: &Pose<T>,
) -> Result<Trajectory<T>, ReplayError> {
    let first = unity_rhs.samples().first().ok_or(ReplayError::EmptyTrajectory)?;
    if unity_rhs.handedness() != Handedness::Right {
        return Err(ReplayError::WrongHandedness);
    }
    let left = t_unity_tcp.compose(&first.pose.inverse());
    let right = t_unity_tcp.inverse();
    Ok(unity_rhs.map_poses(|i, p| if i == 0 { Pose::identity() } else { left.compose(p).compose(&right) }))
}

/// Consecutive waypoint distances above `eef_step_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingReport {
    pub max_step_m: f64,
    /// `(index, step)` where `step` is the distance from waypoint
    /// `index − 1` to waypoint `index`.
    pub violations: Vec<(usize, f64)>,
    pub eef_step_m: f64,
}

impl SpacingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Euclidean translation steps between consecutive poses, flagged when they
/// exceed `eef_step_m`. Rotation steps are not checked.
pub fn validate_waypoint_spacing<T: Real>(
    traj: &Trajectory<T>,
    eef_step_m: f64,
) -> Result<SpacingReport, ReplayError> {
    if !(eef_step_m > 0.0) {
        return Err(ReplayError::InvalidArgument(format!("eef_step must be > 0, got {eef_step_m}")));
    }
    let mut max_step_m: f64 = 0.0;
    let mut violations = Vec::new();
    for (i, w) in traj.samples().windows(2).enumerate() {
        let step = (w[1].pose.t - w[0].pose.t).norm().to_f64_lossy();
        max_step_m = max_step_m.max(step);
        if step > eef_step_m {
            violations.push((i + 1, step));
        }
    }
    Ok(SpacingReport {
        max_step_m,
        violations,
        eef_step_m,
    })
}
