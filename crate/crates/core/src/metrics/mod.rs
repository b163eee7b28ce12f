//! Trajectory comparison: rigid alignment and absolute pose error (APE).
//!
//! APE here is translational: after optional rigid alignment of the
//! estimated positions onto the ground truth, the error of each associated
//! pair is the Euclidean distance between the two positions. With alignment
//! this is the usual ATE.

mod report;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Pose, Quat};
use crate::traj::{associate, TrajError, Trajectory};
use crate::Real;

pub use report::{emit_report, parse_csv, ReportFormat};

/// Relative size of the second singular value of the cross-covariance below
/// which the points are treated as collinear.
const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no timestamp pairs within max_dt")]
    EmptyAssociation,
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Traj(TrajError),
}

impl From<TrajError> for MetricsError {
    fn from(e: TrajError) -> Self {
        match e {
            TrajError::EmptyAssociation => MetricsError::EmptyAssociation,
            other => MetricsError::Traj(other),
        }
    }
}

/// Per-pair errors and their summary statistics, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApeReport {
    /// `(stamp, error_m)` in ground-truth time order.
    pub errors: Vec<(f64, f64)>,
    pub rmse: f64,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation, so `rmse² = mean² + std²`.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub aligned: bool,
    /// Transform applied to the estimated positions when aligned.
    pub alignment: Option<Pose<f64>>,
}

/// Summary statistics of a non-negative error series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorStats {
    pub rmse: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl ErrorStats {
    /// Statistics in a fixed summation order. All zero for an empty slice.
    pub fn from_errors(errors: &[f64]) -> Self {
        if errors.is_empty() {
            return Self::default();
        }
        let n = errors.len() as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &e in errors {
            sum += e;
            sum_sq += e * e;
            min = min.min(e);
            max = max.max(e);
        }
        let mean = sum / n;
        let mut var = 0.0;
        for &e in errors {
            var += (e - mean) * (e - mean);
        }
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            0.5 * (sorted[mid - 1] + sorted[mid])
        } else {
            sorted[mid]
        };
        Self {
            rmse: (sum_sq / n).sqrt(),
            mean,
            median,
            std: (var / n).sqrt(),
            min,
            max,
        }
    }
}

/// RMSE implied by a mean and population standard deviation.
pub fn rmse_from_mean_std(mean: f64, std: f64) -> f64 {
    (mean * mean + std * std).sqrt()
}

/// Rigid transform (rotation and translation, unit scale) that best maps
/// `est` onto `gt` in the least-squares sense (Umeyama / Kabsch).
///
/// A reflection in the SVD solution is turned into a proper rotation by
/// flipping the direction of the smallest singular value.
pub fn umeyama_align<T: Real>(est: &[Vector3<T>], gt: &[Vector3<T>]) -> Result<Pose<T>, MetricsError> {
    if est.len() != gt.len() {
        return Err(MetricsError::InvalidArgument(format!(
            "point lists differ in length ({} vs {})",
            est.len(),
            gt.len()
        )));
    }
    if est.len() < 3 {
        return Err(MetricsError::DegenerateGeometry(format!(
            "need at least 3 points, have {}",
            est.len()
        )));
    }
    let n = T::from_usize(est.len()).expect("point count fits the scalar");
    let mu_e = est.iter().fold(Vector3::zeros(), |acc, p| acc + p) / n;
    let mu_g = gt.iter().fold(Vector3::zeros(), |acc, p| acc + p) / n;
    let mut cov = Matrix3::zeros();
    for (e, g) in est.iter().zip(gt) {
        cov += (g - mu_g) * (e - mu_e).transpose();
    }
    cov /= n;

    let svd = cov.svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(MetricsError::DegenerateGeometry("SVD failed".into()));
    };
    let sv = svd.singular_values;
    let mut sorted = [sv[0], sv[1], sv[2]];
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    if !(sorted[0] > T::zero()) || sorted[1] <= sorted[0] * T::lit(COLLINEAR_TOL) {
        return Err(MetricsError::DegenerateGeometry(
            "points are coincident or collinear".into(),
        ));
    }
    let mut s = Matrix3::identity();
    if (u * v_t).determinant() < T::zero() {
        // Flip the column paired with the smallest singular value.
        let smallest = (0..3)
            .min_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(2);
        s[(smallest, smallest)] = -T::one();
    }
    let r = u * s * v_t;
    let q = Quat::from_rotation_matrix(&r);
    let t = mu_g - q.rotate(&mu_e);
    Ok(Pose::new(t, q))
}

/// Translational APE between an estimate and the ground truth.
///
/// Samples are associated by timestamp within `max_dt`; with `align`, the
/// estimated positions are first mapped onto the ground truth by
/// [`umeyama_align`] over all associated pairs.
pub fn ape<T: Real>(
    est: &Trajectory<T>,
    gt: &Trajectory<T>,
    align: bool,
    max_dt: f64,
) -> Result<ApeReport, MetricsError> {
    if est.is_empty() || gt.is_empty() {
        return Err(MetricsError::EmptyAssociation);
    }
    let set = associate(est, gt, max_dt)?;
    let est_pts: Vec<Vector3<T>> = set.pairs.iter().map(|m| est.samples()[m.index_a].pose.t).collect();
    let gt_pts: Vec<Vector3<T>> = set.pairs.iter().map(|m| gt.samples()[m.index_b].pose.t).collect();

    let alignment = if align {
        Some(umeyama_align(&est_pts, &gt_pts)?)
    } else {
        None
    };
    let errors: Vec<(f64, f64)> = set
        .pairs
        .iter()
        .zip(est_pts.iter().zip(&gt_pts))
        .map(|(m, (e, g))| {
            let e = alignment.map_or(*e, |s| s.transform_point(e));
            let d = g - e;
            let err = (d.x * d.x + d.y * d.y + d.z * d.z).sqrt();
            (gt.samples()[m.index_b].stamp, err.to_f64_lossy())
        })
        .collect();
    let values: Vec<f64> = errors.iter().map(|(_, e)| *e).collect();
    let stats = ErrorStats::from_errors(&values);
    Ok(ApeReport {
        errors,
        rmse: stats.rmse,
        mean: stats.mean,
        median: stats.median,
        std: stats.std,
        min: stats.min,
        max: stats.max,
        aligned: align,
        alignment: alignment.map(|p| p.cast()),
    })
}
