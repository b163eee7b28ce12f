//! Hand-eye calibration: recover the fixed transform `X` between two
//! rigidly linked sensors from paired relative motions.
//!
//! Convention: for every motion pair `(a_i, b_i)`, `a_i · X = X · b_i`,
//! where `a_i` is the relative motion of trajectory A and `b_i` that of
//! trajectory B over the same interval. If B's body pose is `A_body · X`,
//! this is the `X` that is recovered.

mod daniilidis;
mod pairs;
mod tsai;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geom::{rotation_angle_deg, Pose};
use crate::keyval::{format_pose_fields, KeyValError, KeyValues};
use crate::traj::TrajError;
use crate::Real;

pub use pairs::{build_motion_pairs, choose_stride, rotation_axes_observable, PairParams};

/// Largest allowed difference between the rotation angles of `a` and `b`
/// in an accepted pair. Rigid attachment makes the two angles equal.
pub const MAX_ANGLE_MISMATCH_DEG: f64 = 5.0;
/// Rotation axes must differ by more than this for `X` to be observable.
pub const MIN_AXIS_SEPARATION_DEG: f64 = 5.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibError {
    #[error("too few motion pairs: {found} accepted, at least 2 needed")]
    TooFewPairs { found: usize },
    #[error("degenerate motion: rotation axes are all parallel within 5 degrees")]
    DegenerateMotion,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Traj(#[from] TrajError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HandEyeMethod {
    Tsai,
    #[default]
    Daniilidis,
}

impl fmt::Display for HandEyeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HandEyeMethod::Tsai => "tsai",
            HandEyeMethod::Daniilidis => "daniilidis",
        })
    }
}

impl FromStr for HandEyeMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsai" => Ok(HandEyeMethod::Tsai),
            "daniilidis" => Ok(HandEyeMethod::Daniilidis),
            other => Err(format!("unknown hand-eye method {other:?} (expected tsai or daniilidis)")),
        }
    }
}

/// Paired relative motions observed over the same time interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionPair<T: Real> {
    pub a: Pose<T>,
    pub b: Pose<T>,
    /// Mean of the two rotation magnitudes, degrees.
    pub rot_angle_deg: T,
}

impl<T: Real> MotionPair<T> {
    pub fn new(a: Pose<T>, b: Pose<T>) -> Self {
        let deg = T::lit(180.0 / std::f64::consts::PI);
        Self {
            a,
            b,
            rot_angle_deg: (a.q.angle() + b.q.angle()) * T::lit(0.5) * deg,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandEyeResult<T: Real> {
    pub x: Pose<T>,
    pub method: HandEyeMethod,
    pub residual_trans_mm: T,
    pub residual_rot_deg: T,
    pub pairs_used: usize,
}

impl HandEyeResult<f64> {
    /// `key=value` block: method, the seven fields of `X`, residuals in
    /// millimeters and degrees, and the pair count.
    pub fn to_text(&self) -> String {
        format!(
            "method={}\nx={}\nresidual_trans_mm={:.6}\nresidual_rot_deg={:.6}\npairs_used={}\n",
            self.method,
            format_pose_fields(&self.x),
            self.residual_trans_mm,
            self.residual_rot_deg,
            self.pairs_used
        )
    }

    pub fn from_text(text: &str) -> Result<Self, KeyValError> {
        let kv = KeyValues::parse(text)?;
        kv.expect_only(&["method", "x", "residual_trans_mm", "residual_rot_deg", "pairs_used"])?;
        let missing = |k: &str| KeyValError::Missing(k.to_string());
        Ok(Self {
            method: kv
                .parse_value("method", "tsai or daniilidis")?
                .ok_or_else(|| missing("method"))?,
            x: kv.pose("x")?.ok_or_else(|| missing("x"))?,
            residual_trans_mm: kv.f64("residual_trans_mm")?.ok_or_else(|| missing("residual_trans_mm"))?,
            residual_rot_deg: kv.f64("residual_rot_deg")?.ok_or_else(|| missing("residual_rot_deg"))?,
            pairs_used: kv
                .parse_value("pairs_used", "an unsigned integer")?
                .ok_or_else(|| missing("pairs_used"))?,
        })
    }
}

/// Mean translation (mm) and rotation (deg) disagreement between `a·X` and
/// `X·b` over all pairs. Returns `(0, 0)` for an empty slice.
pub fn residual<T: Real>(x: &Pose<T>, pairs: &[MotionPair<T>]) -> (T, T) {
    if pairs.is_empty() {
        return (T::zero(), T::zero());
    }
    let mut trans = T::zero();
    let mut rot = T::zero();
    for p in pairs {
        let lhs = p.a.compose(x);
        let rhs = x.compose(&p.b);
        trans += (lhs.t - rhs.t).norm();
        rot += rotation_angle_deg(&lhs.q, &rhs.q);
    }
    let n = T::from_usize(pairs.len()).expect("pair count fits the scalar");
    (trans / n * T::lit(1000.0), rot / n)
}

/// Solves `a_i · X = X · b_i` for `X` with the requested method.
pub fn solve_hand_eye<T: Real>(
    pairs: &[MotionPair<T>],
    method: HandEyeMethod,
) -> Result<HandEyeResult<T>, CalibError> {
    if pairs.len() < 2 {
        return Err(CalibError::TooFewPairs { found: pairs.len() });
    }
    if !rotation_axes_observable(pairs) {
        return Err(CalibError::DegenerateMotion);
    }
    let x = match method {
        HandEyeMethod::Tsai => tsai::solve(pairs)?,
        HandEyeMethod::Daniilidis => daniilidis::solve(pairs)?,
    };
    if !x.is_finite() {
        return Err(CalibError::NumericalFailure(format!("{method} produced a non-finite transform")));
    }
    let (residual_trans_mm, residual_rot_deg) = residual(&x, pairs);
    Ok(HandEyeResult {
        x,
        method,
        residual_trans_mm,
        residual_rot_deg,
        pairs_used: pairs.len(),
    })
}

#[cfg(test)]
mod tests;
