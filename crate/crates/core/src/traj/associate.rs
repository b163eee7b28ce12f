use super::{TrajError, Trajectory};
use crate::Real;

/// One timestamp correspondence between two trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub index_a: usize,
    pub index_b: usize,
    /// `|stamp_a − stamp_b|` in seconds.
    pub dt: f64,
}

/// Timestamp correspondences; each index appears at most once per side and
/// pairs are ordered by time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssociationSet {
    pub pairs: Vec<Match>,
}

impl AssociationSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Half of the coarser sample period of the two trajectories.
pub fn default_max_dt<T: Real>(a: &Trajectory<T>, b: &Trajectory<T>) -> Option<f64> {
    match (a.sample_period(), b.sample_period()) {
        (Some(pa), Some(pb)) => Some(0.5 * pa.max(pb)),
        (Some(p), None) | (None, Some(p)) => Some(0.5 * p),
        (None, None) => None,
    }
}

/// Index of the nearest stamp in `other` for each stamp in `stamps`, ties
/// resolved to the lower index. Both slices must be sorted ascending.
fn nearest_indices(stamps: &[f64], other: &[f64]) -> Vec<usize> {
    let mut j = 0;
    stamps
        .iter()
        .map(|&t| {
            while j + 1 < other.len() && (other[j + 1] - t).abs() < (other[j] - t).abs() {
                j += 1;
            }
            j
        })
        .collect()
}

/// Mutual nearest neighbours between two ascending stamp lists, keeping
/// pairs with `|Δt| ≤ max_dt`.
pub(crate) fn mutual_nearest(sa: &[f64], sb: &[f64], max_dt: f64) -> Vec<Match> {
    if sa.is_empty() || sb.is_empty() {
        return Vec::new();
    }
    let nn_ab = nearest_indices(sa, sb);
    let nn_ba = nearest_indices(sb, sa);
    nn_ab
        .iter()
        .enumerate()
        .filter(|&(i, &j)| nn_ba[j] == i)
        .map(|(i, &j)| Match {
            index_a: i,
            index_b: j,
            dt: (sa[i] - sb[j]).abs(),
        })
        .filter(|m| m.dt <= max_dt)
        .collect()
}

/// Greedy nearest-timestamp association in increasing time order.
///
/// A pair `(i, j)` is emitted when `b_j` is the nearest stamp to `a_i`,
/// `a_i` is the nearest stamp to `b_j`, and `|Δt| ≤ max_dt`. The rule is
/// symmetric in its arguments and runs in `O(n + m)`.
pub fn associate<T: Real>(
    a: &Trajectory<T>,
    b: &Trajectory<T>,
    max_dt: f64,
) -> Result<AssociationSet, TrajError> {
    if a.is_empty() || b.is_empty() {
        return Err(TrajError::EmptyTrajectory);
    }
    if !(max_dt >= 0.0) {
        return Err(TrajError::InvalidArgument(format!("max_dt must be >= 0, got {max_dt}")));
    }
    let sa: Vec<f64> = a.stamps().collect();
    let sb: Vec<f64> = b.stamps().collect();
    let pairs = mutual_nearest(&sa, &sb, max_dt);
    if pairs.is_empty() {
        return Err(TrajError::EmptyAssociation);
    }
    Ok(AssociationSet { pairs })
}
