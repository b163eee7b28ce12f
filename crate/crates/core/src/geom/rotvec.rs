use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::Quat;
use crate::Real;

/// Axis-angle rotation packed into a 3-vector (Rodrigues vector): the
/// direction is the axis, the magnitude the angle in radians.
///
/// Vectors produced by [`RotVec::from_quat`] are canonical, with magnitude
/// in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotVec<T: Real>(pub Vector3<T>);

impl<T: Real> RotVec<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn angle(&self) -> T {
        self.0.norm()
    }

    pub fn to_quat(&self) -> Quat<T> {
        rotvec_to_quat(self)
    }

    pub fn from_quat(q: &Quat<T>) -> Self {
        quat_to_rotvec(q)
    }
}

pub fn rotvec_to_quat<T: Real>(r: &RotVec<T>) -> Quat<T> {
    let theta = r.0.norm();
    let half = T::lit(0.5);
    if theta < T::lit(1e-10) {
        // sin(θ/2)/θ → 1/2
        return Quat::new_normalize(r.0.x * half, r.0.y * half, r.0.z * half, T::one())
            .unwrap_or_else(Quat::identity);
    }
    let s = (theta * half).sin() / theta;
    Quat::new_normalize(r.0.x * s, r.0.y * s, r.0.z * s, (theta * half).cos())
        .unwrap_or_else(Quat::identity)
}

pub fn quat_to_rotvec<T: Real>(q: &Quat<T>) -> RotVec<T> {
    let q = q.canonical();
    let v = q.vector();
    let vn = v.norm();
    if vn < T::lit(1e-12) {
        // 2·atan2(|v|, w)/|v| → 2/w
        return RotVec(v * (T::lit(2.0) / q.w()));
    }
    let angle = T::lit(2.0) * vn.atan2(q.w());
    RotVec(v * (angle / vn))
}
