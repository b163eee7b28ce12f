use nalgebra::Vector3;

use super::{CalibError, MotionPair, MAX_ANGLE_MISMATCH_DEG, MIN_AXIS_SEPARATION_DEG};
use crate::geom::{Pose, RotVec};
use crate::traj::{associate, default_max_dt, relative_motions, Trajectory};
use crate::Real;

/// Median relative rotation the automatic stride aims for.
const AUTO_STRIDE_MEDIAN_DEG: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PairParams {
    /// Sample spacing of each relative motion; `None` picks the smallest
    /// stride whose median rotation reaches 5°.
    pub stride: Option<usize>,
    /// Association tolerance; `None` uses half the coarser sample period.
    pub max_dt: Option<f64>,
    pub min_rot_deg: f64,
}

impl Default for PairParams {
    fn default() -> Self {
        Self {
            stride: None,
            max_dt: None,
            min_rot_deg: 1.0,
        }
    }
}

/// Smallest stride whose median relative rotation is at least 5°, or the
/// largest usable stride when no stride gets there.
pub fn choose_stride<T: Real>(poses: &[Pose<T>]) -> Option<usize> {
    if poses.len() < 2 {
        return None;
    }
    let target = T::lit(AUTO_STRIDE_MEDIAN_DEG.to_radians());
    let median_angle = |stride: usize| {
        let mut v: Vec<T> = poses
            .iter()
            .zip(&poses[stride..])
            .map(|(a, b)| a.q.angle_to(&b.q))
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        v[v.len() / 2]
    };
    let max_stride = poses.len() - 1;
    (1..=max_stride)
        .find(|&s| median_angle(s) >= target)
        .or(Some(max_stride))
}

fn unit_axis<T: Real>(p: &Pose<T>) -> Option<Vector3<T>> {
    let r = RotVec::from_quat(&p.q).0;
    let n = r.norm();
    (n > T::lit(1e-12)).then(|| r / n)
}

/// True when at least two pairs rotate about axes (as lines) more than 5°
/// apart, the classical identifiability condition for `A·X = X·B`.
pub fn rotation_axes_observable<T: Real>(pairs: &[MotionPair<T>]) -> bool {
    let axes: Vec<Vector3<T>> = pairs.iter().filter_map(|p| unit_axis(&p.a)).collect();
    let Some(first) = axes.first() else {
        return false;
    };
    let cos_limit = T::lit(MIN_AXIS_SEPARATION_DEG.to_radians().cos());
    if axes.iter().any(|v| v.dot(first).abs() < cos_limit) {
        return true;
    }
    // Every axis is within the limit of the first; two of them may still be
    // further apart from each other.
    axes.iter()
        .enumerate()
        .any(|(i, u)| axes[i + 1..].iter().any(|v| u.dot(v).abs() < cos_limit))
}

/// Builds stride-separated relative-motion pairs from two synchronized
/// trajectories.
///
/// Samples are associated by timestamp; the denser trajectory is then
/// interpolated at the stamps of the sparser one. Pairs whose rotation is
/// below `min_rot_deg` on either side, or whose rotation angles disagree by
/// more than 5°, are dropped.
pub fn build_motion_pairs<T: Real>(
    a: &Trajectory<T>,
    b: &Trajectory<T>,
    params: &PairParams,
) -> Result<Vec<MotionPair<T>>, CalibError> {
    if a.handedness() != b.handedness() {
        return Err(CalibError::InvalidArgument(
            "trajectories have different handedness; convert first".into(),
        ));
    }
    let max_dt = match params.max_dt {
        Some(v) => v,
        None => default_max_dt(a, b).ok_or(CalibError::TooFewPairs { found: 0 })?,
    };
    let set = associate(a, b, max_dt)?;
    let a_is_denser = match (a.sample_period(), b.sample_period()) {
        (Some(pa), Some(pb)) => pa < pb,
        _ => a.len() > b.len(),
    };

    let mut seq_a = Vec::with_capacity(set.len());
    let mut seq_b = Vec::with_capacity(set.len());
    for m in &set.pairs {
        let sa = &a.samples()[m.index_a];
        let sb = &b.samples()[m.index_b];
        let (pa, pb) = if a_is_denser {
            match a.sample_at(sb.stamp) {
                Ok(p) => (p, sb.pose),
                Err(_) => continue,
            }
        } else {
            match b.sample_at(sa.stamp) {
                Ok(p) => (sa.pose, p),
                Err(_) => continue,
            }
        };
        seq_a.push(pa);
        seq_b.push(pb);
    }
    if seq_a.len() < 2 {
        return Err(CalibError::TooFewPairs { found: 0 });
    }

    let stride = match params.stride {
        Some(0) => return Err(CalibError::InvalidArgument("stride must be >= 1".into())),
        Some(s) if s >= seq_a.len() => return Err(CalibError::TooFewPairs { found: 0 }),
        Some(s) => s,
        None => choose_stride(&seq_a).expect("at least two samples"),
    };
    let rel_a = relative_motions(&seq_a, stride)?;
    let rel_b = relative_motions(&seq_b, stride)?;

    let deg = T::lit(180.0 / std::f64::consts::PI);
    let min_rot = T::lit(params.min_rot_deg);
    let mismatch = T::lit(MAX_ANGLE_MISMATCH_DEG);
    let pairs: Vec<MotionPair<T>> = rel_a
        .into_iter()
        .zip(rel_b)
        .filter_map(|(ma, mb)| {
            let (ang_a, ang_b) = (ma.q.angle() * deg, mb.q.angle() * deg);
            let keep = ang_a >= min_rot && ang_b >= min_rot && (ang_a - ang_b).abs() <= mismatch;
            keep.then(|| MotionPair::new(ma, mb))
        })
        .collect();
    if pairs.len() < 2 {
        return Err(CalibError::TooFewPairs { found: pairs.len() });
    }
    if !rotation_axes_observable(&pairs) {
        return Err(CalibError::DegenerateMotion);
    }
    Ok(pairs)
}
