//! Daniilidis dual-quaternion hand-eye solver.
//!
//! Each pair contributes six linear equations in the eight dual-quaternion
//! components of `X`. The solution lies in the span of the two right
//! singular vectors with the smallest singular values; the blend is fixed by
//! the unit-norm and real/dual orthogonality constraints.

use nalgebra::{DMatrix, Matrix3, Vector3, Vector4};

use super::{CalibError, MotionPair};
use crate::geom::{Pose, Quat};
use crate::Real;

/// Relative size of the sixth singular value below which the null space is
/// more than two-dimensional.
const RANK_TOL: f64 = 1e-10;

fn skew<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    Matrix3::new(T::zero(), -v.z, v.y, v.z, T::zero(), -v.x, -v.y, v.x, T::zero())
}

/// Quaternion as `(w, x, y, z)` for linear algebra.
fn wxyz<T: Real>(q: &Quat<T>) -> Vector4<T> {
    Vector4::new(q.w(), q.x(), q.y(), q.z())
}

/// Hamilton product on `(w, x, y, z)` vectors (no normalization).
fn qmul<T: Real>(a: &Vector4<T>, b: &Vector4<T>) -> Vector4<T> {
    Vector4::new(
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    )
}

fn conj<T: Real>(a: &Vector4<T>) -> Vector4<T> {
    Vector4::new(a[0], -a[1], -a[2], -a[3])
}

/// Real and dual parts of the unit dual quaternion of `p`, real part with
/// `w ≥ 0`.
fn dual_quat<T: Real>(p: &Pose<T>) -> (Vector4<T>, Vector4<T>) {
    let real = wxyz(&p.q.canonical());
    let t = Vector4::new(T::zero(), p.t.x, p.t.y, p.t.z);
    let dual = qmul(&t, &real) * T::lit(0.5);
    (real, dual)
}

/// Real roots of `a·s² + b·s + c = 0`; a slightly negative discriminant is
/// clamped to zero.
fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Option<[T; 2]> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == T::zero() {
        return None;
    }
    let mut disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        if disc > -(scale * scale) * T::lit(1e-9) {
            disc = T::zero();
        } else {
            return None;
        }
    }
    let sq = disc.sqrt();
    // Numerically stable pair of roots.
    let q = if b >= T::zero() { -(b + sq) } else { -(b - sq) } * T::lit(0.5);
    if a.abs() <= scale * T::lit(1e-14) {
        // Linear: b·s + c = 0.
        return (b != T::zero()).then(|| [-c / b, -c / b]);
    }
    if q == T::zero() {
        return Some([T::zero(), T::zero()]);
    }
    Some([q / a, c / q])
}

pub(super) fn solve<T: Real>(pairs: &[MotionPair<T>]) -> Result<Pose<T>, CalibError> {
    let n = pairs.len();
    let mut m = DMatrix::zeros(6 * n, 8);
    for (i, p) in pairs.iter().enumerate() {
        let (ar, ad) = dual_quat(&p.a);
        let (br, bd) = dual_quat(&p.b);
        let (a, b) = (ar.fixed_rows::<3>(1).into_owned(), br.fixed_rows::<3>(1).into_owned());
        let (a_d, b_d) = (ad.fixed_rows::<3>(1).into_owned(), bd.fixed_rows::<3>(1).into_owned());
        let r = 6 * i;
        m.fixed_view_mut::<3, 1>(r, 0).copy_from(&(a - b));
        m.fixed_view_mut::<3, 3>(r, 1).copy_from(&skew(&(a + b)));
        m.fixed_view_mut::<3, 1>(r + 3, 0).copy_from(&(a_d - b_d));
        m.fixed_view_mut::<3, 3>(r + 3, 1).copy_from(&skew(&(a_d + b_d)));
        m.fixed_view_mut::<3, 1>(r + 3, 4).copy_from(&(a - b));
        m.fixed_view_mut::<3, 3>(r + 3, 5).copy_from(&skew(&(a + b)));
    }

    let svd = m.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| CalibError::NumericalFailure("daniilidis: SVD did not return V".into()))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    if order.len() < 8 {
        return Err(CalibError::TooFewPairs { found: n });
    }
    if sv[order[5]] <= sv[order[0]] * T::lit(RANK_TOL) {
        return Err(CalibError::DegenerateMotion);
    }
    let v1 = v_t.row(order[6]).transpose();
    let v2 = v_t.row(order[7]).transpose();
    let (u1, w1) = (v1.fixed_rows::<4>(0).into_owned(), v1.fixed_rows::<4>(4).into_owned());
    let (u2, w2) = (v2.fixed_rows::<4>(0).into_owned(), v2.fixed_rows::<4>(4).into_owned());

    // q = λ1·u1 + λ2·u2, q' = λ1·w1 + λ2·w2 with |q| = 1 and q·q' = 0.
    let a = u1.dot(&w1);
    let b = u1.dot(&w2) + u2.dot(&w1);
    let c = u2.dot(&w2);
    let norm_of = |l1: T, l2: T| (u1 * l1 + u2 * l2).norm_squared();

    // Solve in whichever ratio keeps the leading coefficient large.
    let candidates: Vec<(T, T)> = if a.abs() >= c.abs() {
        quadratic_roots(a, b, c)
            .ok_or_else(|| CalibError::NumericalFailure("daniilidis: no real root for the blend".into()))?
            .into_iter()
            .map(|s| (s, T::one()))
            .collect()
    } else {
        quadratic_roots(c, b, a)
            .ok_or_else(|| CalibError::NumericalFailure("daniilidis: no real root for the blend".into()))?
            .into_iter()
            .map(|r| (T::one(), r))
            .collect()
    };
    let (l1, l2) = candidates
        .into_iter()
        .filter(|(l1, l2)| l1.is_finite() && l2.is_finite())
        .max_by(|x, y| {
            norm_of(x.0, x.1)
                .partial_cmp(&norm_of(y.0, y.1))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or_else(|| CalibError::NumericalFailure("daniilidis: no finite blend".into()))?;
    let norm = norm_of(l1, l2).sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(CalibError::NumericalFailure("daniilidis: degenerate blend".into()));
    }
    let (l1, l2) = (l1 / norm, l2 / norm);
    let real = u1 * l1 + u2 * l2;
    let dual = w1 * l1 + w2 * l2;

    let t = qmul(&dual, &conj(&real)) * T::lit(2.0);
    let q = Quat::new_normalize(real[1], real[2], real[3], real[0])
        .ok_or_else(|| CalibError::NumericalFailure("daniilidis: zero rotation quaternion".into()))?;
    Ok(Pose::new(Vector3::new(t[1], t[2], t[3]), q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_cases() {
        let r = quadratic_roots(1.0, -3.0, 2.0).unwrap();
        let mut r = r.to_vec();
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_none());
        assert_eq!(quadratic_roots(0.0, 2.0, -4.0).unwrap(), [2.0, 2.0]);
        assert!(quadratic_roots(0.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn dual_quat_encodes_translation() {
        let p: Pose<f64> = Pose::new(Vector3::new(0.1, -0.2, 0.3), Quat::from_axis_angle(&Vector3::new(1.0, 2.0, 3.0), 0.7));
        let (r, d) = dual_quat(&p);
        let t = qmul(&d, &conj(&r)) * 2.0;
        assert!((Vector3::new(t[1], t[2], t[3]) - p.t).norm() < 1e-15);
        assert!(f64::abs(r.dot(&d)) < 1e-15);
    }
}
