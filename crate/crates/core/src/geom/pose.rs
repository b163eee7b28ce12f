use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use super::{slerp, Quat};
use crate::Real;

/// Rigid transform: translation in meters plus a unit quaternion.
///
/// Products follow the homogeneous-matrix convention: `a.compose(&b)` is the
/// matrix `A·B`, i.e. apply `b` first, then `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose<T: Real> {
    pub t: Vector3<T>,
    pub q: Quat<T>,
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Pose<T> {
    pub fn new(t: Vector3<T>, q: Quat<T>) -> Self {
        Self { t, q }
    }

    pub fn identity() -> Self {
        Self {
            t: Vector3::zeros(),
            q: Quat::identity(),
        }
    }

    pub fn from_translation(t: Vector3<T>) -> Self {
        Self {
            t,
            q: Quat::identity(),
        }
    }

    pub fn from_rotation(q: Quat<T>) -> Self {
        Self {
            t: Vector3::zeros(),
            q,
        }
    }

    /// Builds a pose from the seven TUM fields `x y z qx qy qz qw`.
    pub fn from_array(v: [T; 7]) -> Option<Self> {
        let q = Quat::new_normalize(v[3], v[4], v[5], v[6])?;
        let t = Vector3::new(v[0], v[1], v[2]);
        t.iter().all(|c| c.is_finite()).then_some(Self { t, q })
    }

    /// Seven fields `x y z qx qy qz qw`.
    pub fn to_array(&self) -> [T; 7] {
        [
            self.t.x,
            self.t.y,
            self.t.z,
            self.q.x(),
            self.q.y(),
            self.q.z(),
            self.q.w(),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            t: self.t + self.q.rotate(&other.t),
            q: self.q * other.q,
        }
    }

    pub fn inverse(&self) -> Self {
        let qi = self.q.inverse();
        Self {
            t: -qi.rotate(&self.t),
            q: qi,
        }
    }

    /// Applies the transform to a point.
    pub fn transform_point(&self, p: &Vector3<T>) -> Vector3<T> {
        self.t + self.q.rotate(p)
    }

    /// Linear interpolation of translation and slerp of rotation.
    pub fn interpolate(&self, other: &Self, u: T) -> Self {
        Self {
            t: self.t + (other.t - self.t) * u,
            q: slerp(&self.q, &other.q, u),
        }
    }

    pub fn to_matrix(&self) -> Matrix4<T> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&self.q.to_rotation_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.t);
        m
    }

    /// Same pose with the quaternion sign made canonical (`w ≥ 0`).
    pub fn canonical(&self) -> Self {
        Self {
            t: self.t,
            q: self.q.canonical(),
        }
    }

    /// Translation distance (m) and rotation angle (rad) between two poses.
    pub fn distance_to(&self, other: &Self) -> (T, T) {
        ((self.t - other.t).norm(), self.q.angle_to(&other.q))
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        Pose {
            t: Vector3::new(
                U::lit(self.t.x.to_f64_lossy()),
                U::lit(self.t.y.to_f64_lossy()),
                U::lit(self.t.z.to_f64_lossy()),
            ),
            q: self.q.cast(),
        }
    }
}

/// Free-function form of [`Pose::compose`].
pub fn compose<T: Real>(a: &Pose<T>, b: &Pose<T>) -> Pose<T> {
    a.compose(b)
}

pub fn inverse<T: Real>(a: &Pose<T>) -> Pose<T> {
    a.inverse()
}

pub fn interpolate_pose<T: Real>(p0: &Pose<T>, p1: &Pose<T>, u: T) -> Pose<T> {
    p0.interpolate(p1, u)
}

/// Mirrors a left-handed pose into the right-handed convention by flipping
/// the Y axis: negates `y`, `q_y` and `q_w`.
///
/// Negating `{q_x, q_z}` instead gives the same rotation (the two results
/// differ by the quaternion sign). The map is an exact involution.
pub fn lhs_to_rhs<T: Real>(p: &Pose<T>) -> Pose<T> {
    let q = &p.q;
    Pose {
        t: Vector3::new(p.t.x, -p.t.y, p.t.z),
        q: Quat::from_raw(q.x(), -q.y(), q.z(), -q.w()),
    }
}
