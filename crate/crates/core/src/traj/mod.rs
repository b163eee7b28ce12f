//! Trajectory container and time-domain operations.

mod associate;
mod tum;

pub use associate::{associate, default_max_dt, AssociationSet, Match};
pub(crate) use associate::mutual_nearest;
pub use tum::{parse_tum, write_tum};

use thiserror::Error;

use crate::geom::{lhs_to_rhs, Handedness, Pose};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("timestamps not strictly increasing at sample {index} ({prev} then {stamp})")]
    NonMonotonicTimestamps { index: usize, prev: f64, stamp: f64 },
    #[error("line {line}: quaternion norm {norm} deviates from 1 by more than 1e-3")]
    BadQuaternion { line: usize, norm: f64 },
    #[error("sample {index}: invalid timestamp {stamp}")]
    InvalidStamp { index: usize, stamp: f64 },
    #[error("sample {index}: pose has non-finite components")]
    NonFinitePose { index: usize },
    #[error("time {t} outside trajectory span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("no timestamp pairs within max_dt")]
    EmptyAssociation,
    #[error("no samples left in [{t0}, {t1}]")]
    EmptyResult { t0: f64, t1: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("{0}")]
    InvalidArgument(String),
}

/// Pose with a timestamp in seconds (Unix epoch or any common origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPose<T: Real> {
    pub stamp: f64,
    pub pose: Pose<T>,
}

impl<T: Real> TimedPose<T> {
    pub fn new(stamp: f64, pose: Pose<T>) -> Self {
        Self { stamp, pose }
    }
}

/// Time-ordered poses sharing one frame and handedness.
///
/// Construction validates that stamps are finite, non-negative and strictly
/// increasing, so every `Trajectory` value upholds those invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    samples: Vec<TimedPose<T>>,
    frame: String,
    handedness: Handedness,
    nominal_rate_hz: Option<f64>,
    comments: Vec<String>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(
        samples: Vec<TimedPose<T>>,
        frame: impl Into<String>,
        handedness: Handedness,
    ) -> Result<Self, TrajError> {
        validate(&samples)?;
        Ok(Self {
            samples,
            frame: frame.into(),
            handedness,
            nominal_rate_hz: None,
            comments: Vec::new(),
        })
    }

    /// Right-handed trajectory in the frame `"world"`.
    pub fn from_samples(samples: Vec<TimedPose<T>>) -> Result<Self, TrajError> {
        Self::new(samples, "world", Handedness::Right)
    }

    pub fn empty(frame: impl Into<String>, handedness: Handedness) -> Self {
        Self {
            samples: Vec::new(),
            frame: frame.into(),
            handedness,
            nominal_rate_hz: None,
            comments: Vec::new(),
        }
    }

    pub fn with_rate(mut self, hz: f64) -> Self {
        self.nominal_rate_hz = Some(hz);
        self
    }

    pub fn with_frame(mut self, frame: impl Into<String>) -> Self {
        self.frame = frame.into();
        self
    }

    /// Re-tags handedness without touching the poses.
    pub fn with_handedness(mut self, handedness: Handedness) -> Self {
        self.handedness = handedness;
        self
    }

    pub fn with_comments(mut self, comments: Vec<String>) -> Self {
        self.comments = comments;
        self
    }

    pub fn samples(&self) -> &[TimedPose<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<TimedPose<T>> {
        self.samples
    }

    pub fn frame(&self) -> &str {
        &self.frame
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    pub fn nominal_rate_hz(&self) -> Option<f64> {
        self.nominal_rate_hz
    }

    /// `#` lines read from the source file, without the leading `#`.
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn stamps(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.stamp)
    }

    pub fn poses(&self) -> impl ExactSizeIterator<Item = &Pose<T>> + '_ {
        self.samples.iter().map(|s| &s.pose)
    }

    pub fn first_stamp(&self) -> Option<f64> {
        self.samples.first().map(|s| s.stamp)
    }

    pub fn last_stamp(&self) -> Option<f64> {
        self.samples.last().map(|s| s.stamp)
    }

    /// Nominal sample period, or the median stamp spacing when no rate is
    /// declared. `None` for fewer than two samples without a rate.
    pub fn sample_period(&self) -> Option<f64> {
        if let Some(hz) = self.nominal_rate_hz {
            return Some(1.0 / hz);
        }
        if self.samples.len() < 2 {
            return None;
        }
        let mut dts: Vec<f64> = self.samples.windows(2).map(|w| w[1].stamp - w[0].stamp).collect();
        dts.sort_by(f64::total_cmp);
        Some(dts[dts.len() / 2])
    }

    /// Same trajectory with poses replaced element-wise; stamps and tags are
    /// kept.
    pub fn map_poses(&self, mut f: impl FnMut(usize, &Pose<T>) -> Pose<T>) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(i, s)| TimedPose::new(s.stamp, f(i, &s.pose)))
                .collect(),
            frame: self.frame.clone(),
            handedness: self.handedness,
            nominal_rate_hz: self.nominal_rate_hz,
            comments: self.comments.clone(),
        }
    }

    /// Adds `dt` seconds to every stamp. Fails if a stamp would become
    /// negative or non-finite.
    pub fn shifted(&self, dt: f64) -> Result<Self, TrajError> {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.stamp += dt;
        }
        validate(&out.samples)?;
        Ok(out)
    }

    /// Mirrors every pose through the Y axis and flips the handedness tag.
    pub fn mirror_handedness(&self) -> Self {
        let mut out = self.map_poses(|_, p| lhs_to_rhs(p));
        out.handedness = self.handedness.mirrored();
        out
    }

    /// Converts a left-handed trajectory to right-handed; right-handed input
    /// is returned unchanged.
    pub fn to_rhs(&self) -> Self {
        match self.handedness {
            Handedness::Left => self.mirror_handedness(),
            Handedness::Right => self.clone(),
        }
    }

    /// Keeps samples `0, k, 2k, …` and divides the nominal rate by `k`.
    pub fn dilute(&self, k: usize) -> Result<Self, TrajError> {
        if k == 0 {
            return Err(TrajError::InvalidArgument("dilution factor must be >= 1".into()));
        }
        let mut out = self.clone();
        out.samples = self.samples.iter().step_by(k).copied().collect();
        out.nominal_rate_hz = self.nominal_rate_hz.map(|hz| hz / k as f64);
        Ok(out)
    }

    /// Pose at time `t`: the exact sample when `t` hits a stamp, otherwise
    /// linear/slerp interpolation between the bracketing samples.
    pub fn sample_at(&self, t: f64) -> Result<Pose<T>, TrajError> {
        let (first, last) = match (self.samples.first(), self.samples.last()) {
            (Some(f), Some(l)) => (f.stamp, l.stamp),
            _ => return Err(TrajError::EmptyTrajectory),
        };
        if !(t >= first && t <= last) {
            return Err(TrajError::OutOfRange {
                t,
                start: first,
                end: last,
            });
        }
        match self.samples.binary_search_by(|s| s.stamp.total_cmp(&t)) {
            Ok(i) => Ok(self.samples[i].pose),
            Err(i) => {
                let (a, b) = (&self.samples[i - 1], &self.samples[i]);
                let u = (t - a.stamp) / (b.stamp - a.stamp);
                Ok(a.pose.interpolate(&b.pose, T::lit(u)))
            }
        }
    }

    /// `O_0⁻¹ · O_i` for every sample; element 0 is the identity.
    pub fn increments_from_start(&self) -> Result<Vec<Pose<T>>, TrajError> {
        let first = self.samples.first().ok_or(TrajError::EmptyTrajectory)?;
        let inv0 = first.pose.inverse();
        Ok(std::iter::once(Pose::identity())
            .chain(self.samples[1..].iter().map(|s| inv0.compose(&s.pose)))
            .collect())
    }

    /// `O_i⁻¹ · O_{i+stride}` for every valid `i`.
    pub fn relative_motions(&self, stride: usize) -> Result<Vec<Pose<T>>, TrajError> {
        relative_motions(&self.poses().copied().collect::<Vec<_>>(), stride)
    }

    /// Samples with `t0 ≤ stamp ≤ t1`.
    pub fn trim(&self, t0: f64, t1: f64) -> Result<Self, TrajError> {
        if !(t0 < t1) {
            return Err(TrajError::InvalidArgument(format!("trim window [{t0}, {t1}] is empty")));
        }
        let mut out = self.clone();
        out.samples.retain(|s| s.stamp >= t0 && s.stamp <= t1);
        if out.samples.is_empty() {
            return Err(TrajError::EmptyResult { t0, t1 });
        }
        Ok(out)
    }

    pub fn cast<U: Real>(&self) -> Trajectory<U> {
        Trajectory {
            samples: self
                .samples
                .iter()
                .map(|s| TimedPose::new(s.stamp, s.pose.cast()))
                .collect(),
            frame: self.frame.clone(),
            handedness: self.handedness,
            nominal_rate_hz: self.nominal_rate_hz,
            comments: self.comments.clone(),
        }
    }
}

/// `p_i⁻¹ · p_{i+stride}` over a plain pose sequence.
pub fn relative_motions<T: Real>(poses: &[Pose<T>], stride: usize) -> Result<Vec<Pose<T>>, TrajError> {
    if stride == 0 {
        return Err(TrajError::InvalidArgument("stride must be >= 1".into()));
    }
    if poses.len() < stride + 1 {
        return Err(TrajError::InvalidArgument(format!(
            "need at least {} samples for stride {stride}, have {}",
            stride + 1,
            poses.len()
        )));
    }
    Ok(poses
        .iter()
        .zip(&poses[stride..])
        .map(|(a, b)| a.inverse().compose(b))
        .collect())
}

fn validate<T: Real>(samples: &[TimedPose<T>]) -> Result<(), TrajError> {
    for (i, s) in samples.iter().enumerate() {
        if !s.stamp.is_finite() || s.stamp < 0.0 {
            return Err(TrajError::InvalidStamp {
                index: i,
                stamp: s.stamp,
            });
        }
        if !s.pose.is_finite() {
            return Err(TrajError::NonFinitePose { index: i });
        }
        if i > 0 && s.stamp <= samples[i - 1].stamp {
            return Err(TrajError::NonMonotonicTimestamps {
                index: i,
                prev: samples[i - 1].stamp,
                stamp: s.stamp,
            });
        }
    }
    Ok(())
}
