//! Clock-offset estimation from matched axial position peaks.
//!
//! Both trajectories are reduced to the local extrema of their x/y/z
//! positions. Extrema of the same axis and polarity are paired by nearest
//! stamp, and the offset is the mean stamp difference over all pairs.
//! Peaks sit on sample stamps (no sub-sample refinement).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keyval::{KeyValError, KeyValues};
use crate::traj::{mutual_nearest, TrajError, Trajectory};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyncError {
    #[error("no peaks with prominence >= {prominence_m} m on axis {axis}")]
    NoPeaks { axis: Axis, prominence_m: f64 },
    #[error("no peak pairs matched within the match window")]
    NoMatches,
    #[error("trajectory time spans do not overlap")]
    InsufficientOverlap,
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Traj(#[from] TrajError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(format!("unknown axis {other:?}")),
        }
    }
}

/// Parses an axis list such as `"xyz"`, `"x,z"` or `"y"`.
pub fn parse_axes(s: &str) -> Result<Vec<Axis>, String> {
    let mut axes: Vec<Axis> = s
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| c.to_string().parse())
        .collect::<Result<_, _>>()?;
    axes.sort();
    axes.dedup();
    if axes.is_empty() {
        return Err("empty axis list".into());
    }
    Ok(axes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub stamp: f64,
    /// Position along the axis in meters.
    pub value: f64,
    pub polarity: Polarity,
    pub prominence: f64,
}

/// Extrema of one position axis, ordered by stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakList {
    pub axis: Axis,
    pub peaks: Vec<Peak>,
}

impl PeakList {
    pub fn of(&self, polarity: Polarity) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(move |p| p.polarity == polarity)
    }
}

/// Tuning for [`estimate_offset`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyncParams {
    pub axes: Vec<Axis>,
    pub prominence_m: f64,
    pub min_separation_s: f64,
    pub match_window_s: f64,
}

impl Default for SyncParams {
    fn default() -> Self {
        Self {
            axes: Axis::ALL.to_vec(),
            prominence_m: 0.01,
            min_separation_s: 0.5,
            match_window_s: 0.5,
        }
    }
}

/// Result of [`estimate_offset`]: `offset_s` is the mean of
/// `stamp_b − stamp_a` over matched peaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetReport {
    pub offset_s: f64,
    pub per_peak_diffs: Vec<f64>,
    pub matched_count: usize,
    /// Population standard deviation of `per_peak_diffs`.
    pub spread_s: f64,
}

impl OffsetReport {
    fn from_diffs(diffs: Vec<f64>) -> Self {
        let n = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / n;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
        Self {
            offset_s: mean,
            matched_count: diffs.len(),
            spread_s: var.sqrt(),
            per_peak_diffs: diffs,
        }
    }

    /// `offset_s`, `matched_count` and `spread_s` as `key=value` lines.
    pub fn to_text(&self) -> String {
        format!(
            "offset_s={:.9}\nmatched_count={}\nspread_s={:.9}\n",
            self.offset_s, self.matched_count, self.spread_s
        )
    }

    /// Reads the summary written by [`OffsetReport::to_text`]; the per-peak
    /// list is not part of the text form and comes back empty.
    pub fn from_text(text: &str) -> Result<Self, KeyValError> {
        let kv = KeyValues::parse(text)?;
        kv.expect_only(&["offset_s", "matched_count", "spread_s"])?;
        let missing = |k: &str| KeyValError::Missing(k.to_string());
        Ok(Self {
            offset_s: kv.f64("offset_s")?.ok_or_else(|| missing("offset_s"))?,
            matched_count: kv
                .parse_value("matched_count", "an unsigned integer")?
                .ok_or_else(|| missing("matched_count"))?,
            spread_s: kv.f64("spread_s")?.ok_or_else(|| missing("spread_s"))?,
            per_peak_diffs: Vec::new(),
        })
    }
}

/// Strict local maxima of `v` (plateaus report their middle sample) with
/// their topographic prominence.
fn local_maxima(v: &[f64]) -> Vec<(usize, f64)> {
    let n = v.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if v[i - 1] < v[i] {
            let mut j = i;
            while j + 1 < n && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < n && v[j + 1] < v[i] {
                let mid = (i + j) / 2;
                out.push((mid, prominence(v, mid)));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Height of `v[i]` above the higher of the two lowest points reachable on
/// either side before meeting a strictly higher sample.
fn prominence(v: &[f64], i: usize) -> f64 {
    let h = v[i];
    let mut left_min = h;
    for &x in v[..i].iter().rev() {
        if x > h {
            break;
        }
        left_min = left_min.min(x);
    }
    let mut right_min = h;
    for &x in &v[i + 1..] {
        if x > h {
            break;
        }
        right_min = right_min.min(x);
    }
    h - left_min.max(right_min)
}

/// Keeps the most prominent peaks such that no two are closer than
/// `min_sep` seconds.
fn thin(mut peaks: Vec<Peak>, min_sep: f64) -> Vec<Peak> {
    peaks.sort_by(|a, b| b.prominence.total_cmp(&a.prominence).then(a.stamp.total_cmp(&b.stamp)));
    let mut kept: Vec<Peak> = Vec::with_capacity(peaks.len());
    for p in peaks {
        let pos = kept.partition_point(|k| k.stamp < p.stamp);
        let clear_left = pos == 0 || p.stamp - kept[pos - 1].stamp >= min_sep;
        let clear_right = pos == kept.len() || kept[pos].stamp - p.stamp >= min_sep;
        if clear_left && clear_right {
            kept.insert(pos, p);
        }
    }
    kept
}

/// Local maxima and minima of one position axis with prominence at least
/// `prominence_m`, thinned so that same-polarity peaks are at least
/// `min_separation_s` apart (the more prominent one wins).
pub fn detect_peaks<T: Real>(
    traj: &Trajectory<T>,
    axis: Axis,
    prominence_m: f64,
    min_separation_s: f64,
) -> Result<PeakList, SyncError> {
    if traj.is_empty() {
        return Err(SyncError::Traj(TrajError::EmptyTrajectory));
    }
    if !(prominence_m > 0.0) {
        return Err(SyncError::InvalidArgument(format!("prominence must be > 0, got {prominence_m}")));
    }
    if !(min_separation_s >= 0.0) {
        return Err(SyncError::InvalidArgument(format!(
            "min separation must be >= 0, got {min_separation_s}"
        )));
    }
    let stamps: Vec<f64> = traj.stamps().collect();
    let values: Vec<f64> = traj.poses().map(|p| p.t[axis.index()].to_f64_lossy()).collect();
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();

    let collect = |series: &[f64], polarity: Polarity| -> Vec<Peak> {
        let found = local_maxima(series)
            .into_iter()
            .filter(|&(_, prom)| prom >= prominence_m)
            .map(|(i, prom)| Peak {
                stamp: stamps[i],
                value: values[i],
                polarity,
                prominence: prom,
            })
            .collect();
        thin(found, min_separation_s)
    };
    let mut peaks = collect(&values, Polarity::Max);
    peaks.extend(collect(&negated, Polarity::Min));
    peaks.sort_by(|a, b| a.stamp.total_cmp(&b.stamp));
    if peaks.is_empty() {
        return Err(SyncError::NoPeaks { axis, prominence_m });
    }
    Ok(PeakList { axis, peaks })
}

/// Estimates the constant clock offset `stamp_b − stamp_a` from matched
/// position peaks on `params.axes`.
///
/// Peaks of the same axis and polarity are paired when each is the other's
/// nearest peak and they are at most `match_window_s` apart. Axes where
/// either trajectory has no qualifying peaks contribute nothing.
pub fn estimate_offset<T: Real>(
    a: &Trajectory<T>,
    b: &Trajectory<T>,
    params: &SyncParams,
) -> Result<OffsetReport, SyncError> {
    if params.axes.is_empty() {
        return Err(SyncError::InvalidArgument("no axes selected".into()));
    }
    let (Some(a0), Some(a1), Some(b0), Some(b1)) =
        (a.first_stamp(), a.last_stamp(), b.first_stamp(), b.last_stamp())
    else {
        return Err(SyncError::InsufficientOverlap);
    };
    let w = params.match_window_s;
    if b0 > a1 + w || a0 > b1 + w {
        return Err(SyncError::InsufficientOverlap);
    }

    let mut diffs = Vec::new();
    for &axis in &params.axes {
        let peaks = |t: &Trajectory<T>| match detect_peaks(t, axis, params.prominence_m, params.min_separation_s) {
            Ok(list) => Ok(Some(list)),
            Err(SyncError::NoPeaks { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        let (Some(pa), Some(pb)) = (peaks(a)?, peaks(b)?) else {
            continue;
        };
        for polarity in [Polarity::Max, Polarity::Min] {
            let sa: Vec<f64> = pa.of(polarity).map(|p| p.stamp).collect();
            let sb: Vec<f64> = pb.of(polarity).map(|p| p.stamp).collect();
            diffs.extend(mutual_nearest(&sa, &sb, w).iter().map(|m| sb[m.index_b] - sa[m.index_a]));
        }
    }
    if diffs.is_empty() {
        return Err(SyncError::NoMatches);
    }
    Ok(OffsetReport::from_diffs(diffs))
}

/// Adds `dt` to every stamp. Use `apply_offset(b, -report.offset_s)` to
/// bring `b` onto `a`'s clock.
pub fn apply_offset<T: Real>(traj: &Trajectory<T>, dt: f64) -> Result<Trajectory<T>, SyncError> {
    Ok(traj.shifted(dt)?)
}

#[cfg(test)]
mod tests;
