use std::fmt::Write as _;

use super::{TimedPose, TrajError, Trajectory};
use crate::geom::{Handedness, Pose};
use crate::Real;

const QUAT_NORM_TOLERANCE: f64 = 1e-3;

/// Parses TUM text: one `timestamp x y z qx qy qz qw` row per line.
///
/// Blank lines are skipped and `#` lines are kept as comments. Quaternions
/// are renormalized; rows whose quaternion norm is off by more than 1e-3 are
/// rejected. The result is tagged right-handed in frame `"tum"`; re-tag with
/// [`Trajectory::with_handedness`] for left-handed sources.
pub fn parse_tum<T: Real>(text: &str) -> Result<Trajectory<T>, TrajError> {
    let mut samples: Vec<TimedPose<T>> = Vec::new();
    let mut comments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(TrajError::MalformedRow {
                line: line_no,
                reason: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let mut v = [0.0f64; 8];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| TrajError::MalformedRow {
                    line: line_no,
                    reason: format!("not a finite number: {f:?}"),
                })?;
        }
        let norm = (v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]).sqrt();
        if (norm - 1.0).abs() > QUAT_NORM_TOLERANCE {
            return Err(TrajError::BadQuaternion { line: line_no, norm });
        }
        if v[0] < 0.0 {
            return Err(TrajError::InvalidStamp {
                index: samples.len(),
                stamp: v[0],
            });
        }
        if let Some(prev) = samples.last() {
            if v[0] <= prev.stamp {
                return Err(TrajError::NonMonotonicTimestamps {
                    index: samples.len(),
                    prev: prev.stamp,
                    stamp: v[0],
                });
            }
        }
        let pose = Pose::from_array([
            T::lit(v[1]),
            T::lit(v[2]),
            T::lit(v[3]),
            T::lit(v[4]),
            T::lit(v[5]),
            T::lit(v[6]),
            T::lit(v[7]),
        ])
        .ok_or(TrajError::BadQuaternion { line: line_no, norm })?;
        samples.push(TimedPose::new(v[0], pose));
    }
    Ok(Trajectory::new(samples, "tum", Handedness::Right)?.with_comments(comments))
}

/// Writes TUM text: nine decimals per field, single spaces, `\n` endings,
/// quaternion sign canonicalized to `w ≥ 0`. Comments are not written.
pub fn write_tum<T: Real>(traj: &Trajectory<T>) -> String {
    let mut out = String::with_capacity(traj.len() * 96);
    for s in traj.samples() {
        let _ = write!(out, "{:.9}", s.stamp);
        for v in s.pose.canonical().to_array() {
            let _ = write!(out, " {:.9}", v.to_f64_lossy());
        }
        out.push('\n');
    }
    out
}
