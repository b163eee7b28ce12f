//! Tsai-Lenz: rotation from modified Rodrigues vectors, then translation by
//! linear least squares.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::{CalibError, MotionPair};
use crate::geom::{Pose, Quat};
use crate::Real;

/// Relative singular-value floor below which a least-squares system is
/// treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

fn skew<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    Matrix3::new(T::zero(), -v.z, v.y, v.z, T::zero(), -v.x, -v.y, v.x, T::zero())
}

/// `2·sin(θ/2)·k`, the vector part of the `w ≥ 0` quaternion doubled.
fn modified_rodrigues<T: Real>(q: &Quat<T>) -> Vector3<T> {
    q.canonical().vector() * T::lit(2.0)
}

fn least_squares<T: Real>(m: DMatrix<T>, rhs: DVector<T>, what: &str) -> Result<Vector3<T>, CalibError> {
    let svd = m.svd(true, true);
    let sv = &svd.singular_values;
    let max = sv.max();
    let min = sv.min();
    if !(max > T::zero()) || min <= max * T::lit(RANK_TOL) {
        return Err(CalibError::DegenerateMotion);
    }
    let x = svd
        .solve(&rhs, T::zero())
        .map_err(|e| CalibError::NumericalFailure(format!("tsai {what}: {e}")))?;
    let x = Vector3::new(x[0], x[1], x[2]);
    if x.iter().all(|c| c.is_finite()) {
        Ok(x)
    } else {
        Err(CalibError::NumericalFailure(format!("tsai {what}: non-finite solution")))
    }
}

pub(super) fn solve<T: Real>(pairs: &[MotionPair<T>]) -> Result<Pose<T>, CalibError> {
    let n = pairs.len();
    let mut m = DMatrix::zeros(3 * n, 3);
    let mut rhs = DVector::zeros(3 * n);
    for (i, p) in pairs.iter().enumerate() {
        let pa = modified_rodrigues(&p.a.q);
        let pb = modified_rodrigues(&p.b.q);
        m.fixed_view_mut::<3, 3>(3 * i, 0).copy_from(&skew(&(pa + pb)));
        rhs.fixed_rows_mut::<3>(3 * i).copy_from(&(pb - pa));
    }
    let x_prime = least_squares(m, rhs, "rotation")?;

    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let p = x_prime * (two / (one + x_prime.norm_squared()).sqrt());
    let pn2 = p.norm_squared();
    let rot = Matrix3::identity() * (one - pn2 * half)
        + (p * p.transpose() + skew(&p) * (T::lit(4.0) - pn2).max(T::zero()).sqrt()) * half;
    let qx = Quat::from_rotation_matrix(&rot);

    let mut m = DMatrix::zeros(3 * n, 3);
    let mut rhs = DVector::zeros(3 * n);
    for (i, pr) in pairs.iter().enumerate() {
        let ra = pr.a.q.to_rotation_matrix() - Matrix3::identity();
        m.fixed_view_mut::<3, 3>(3 * i, 0).copy_from(&ra);
        rhs.fixed_rows_mut::<3>(3 * i)
            .copy_from(&(qx.rotate(&pr.b.t) - pr.a.t));
    }
    let t = least_squares(m, rhs, "translation")?;
    Ok(Pose::new(t, qx))
}
