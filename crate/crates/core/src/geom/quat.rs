use std::ops::{Mul, Neg};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::Real;

/// Unit quaternion stored as `(x, y, z, w)`.
///
/// Every constructor normalizes, so a `Quat` always satisfies
/// `|x² + y² + z² + w² − 1| ≤ 1e-9` (for `f64`). `q` and `−q` describe the
/// same rotation; use [`Quat::same_rotation`] or [`Quat::angle_to`] to
/// compare rotations and `==` only for component equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quat<T> {
    x: T,
    y: T,
    z: T,
    w: T,
}

impl<T: Real> Quat<T> {
    pub fn identity() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
            w: T::one(),
        }
    }

    /// Normalizing constructor. Returns `None` for a zero or non-finite
    /// input.
    pub fn new_normalize(x: T, y: T, z: T, w: T) -> Option<Self> {
        let norm = (x * x + y * y + z * z + w * w).sqrt();
        if !norm.is_finite() || norm <= T::default_epsilon() {
            return None;
        }
        Some(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
            w: w / norm,
        })
    }

    /// Rotation of `angle` radians about `axis` (need not be unit length).
    /// A zero axis yields the identity.
    pub fn from_axis_angle(axis: &Vector3<T>, angle: T) -> Self {
        let n = axis.norm();
        if n <= T::default_epsilon() {
            return Self::identity();
        }
        let half = angle * T::lit(0.5);
        let s = half.sin() / n;
        Self::new_normalize(axis.x * s, axis.y * s, axis.z * s, half.cos())
            .unwrap_or_else(Self::identity)
    }

    pub fn x(&self) -> T {
        self.x
    }
    pub fn y(&self) -> T {
        self.y
    }
    pub fn z(&self) -> T {
        self.z
    }
    pub fn w(&self) -> T {
        self.w
    }

    /// Components in file order `[x, y, z, w]`.
    pub fn to_array(&self) -> [T; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn vector(&self) -> Vector3<T> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm_squared(&self) -> T {
        self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w
    }

    pub fn conjugate(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
            w: self.w,
        }
    }

    /// Inverse rotation; equal to the conjugate for unit quaternions.
    pub fn inverse(&self) -> Self {
        self.conjugate()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z + self.w * other.w
    }

    /// Re-projects onto the unit sphere. Used after products to stop
    /// round-off from accumulating over long composition chains.
    pub fn renormalize(&self) -> Self {
        Self::new_normalize(self.x, self.y, self.z, self.w).unwrap_or_else(Self::identity)
    }

    /// Renormalizes only when the norm has drifted past a few ulps, so exact
    /// products (e.g. with the identity) keep their bits.
    pub(crate) fn renormalize_if_needed(&self) -> Self {
        let drift = (self.norm_squared() - T::one()).abs();
        if drift > T::default_epsilon() * T::lit(8.0) {
            self.renormalize()
        } else {
            *self
        }
    }

    /// Hamilton product without renormalization.
    pub(crate) fn mul_raw(&self, rhs: &Self) -> Self {
        let (a, b) = (self, rhs);
        Self {
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        }
    }

    /// Rotates a 3-vector: `q · v · q*`.
    pub fn rotate(&self, v: &Vector3<T>) -> Vector3<T> {
        let u = self.vector();
        let two = T::lit(2.0);
        let t = u.cross(v) * two;
        v + t * self.w + u.cross(&t)
    }

    /// Sign representative with `w ≥ 0`; when `w = 0` the first nonzero of
    /// `x, y, z` is made positive.
    pub fn canonical(&self) -> Self {
        let flip = if self.w != T::zero() {
            self.w < T::zero()
        } else {
            [self.x, self.y, self.z]
                .into_iter()
                .find(|c| *c != T::zero())
                .is_some_and(|c| c < T::zero())
        };
        if flip {
            -*self
        } else {
            *self
        }
    }

    /// Geodesic rotation angle of this quaternion in `[0, π]`.
    pub fn angle(&self) -> T {
        let v = self.vector().norm();
        T::lit(2.0) * v.atan2(self.w.abs())
    }

    /// Geodesic angle between two rotations in `[0, π]` radians, invariant
    /// under the sign of either quaternion.
    pub fn angle_to(&self, other: &Self) -> T {
        // Chord lengths on the unit 3-sphere; exact zero for equal inputs.
        let d = (self.to_array_vec() - other.to_array_vec()).norm();
        let s = (self.to_array_vec() + other.to_array_vec()).norm();
        let (lo, hi) = if d < s { (d, s) } else { (s, d) };
        T::lit(4.0) * lo.atan2(hi)
    }

    fn to_array_vec(self) -> nalgebra::Vector4<T> {
        nalgebra::Vector4::new(self.x, self.y, self.z, self.w)
    }

    /// True when both quaternions represent the same rotation within `tol`
    /// radians.
    pub fn same_rotation(&self, other: &Self, tol: T) -> bool {
        self.angle_to(other) <= tol
    }

    pub fn to_rotation_matrix(&self) -> Matrix3<T> {
        let (x, y, z, w) = (self.x, self.y, self.z, self.w);
        let one = T::one();
        let two = T::lit(2.0);
        Matrix3::new(
            one - two * (y * y + z * z),
            two * (x * y - z * w),
            two * (x * z + y * w),
            two * (x * y + z * w),
            one - two * (x * x + z * z),
            two * (y * z - x * w),
            two * (x * z - y * w),
            two * (y * z + x * w),
            one - two * (x * x + y * y),
        )
    }

    /// Quaternion of a proper rotation matrix (Shepperd's method).
    pub fn from_rotation_matrix(m: &Matrix3<T>) -> Self {
        let one = T::one();
        let quarter = T::lit(0.25);
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let (x, y, z, w);
        if trace > T::zero() {
            let s = (trace + one).sqrt() * T::lit(2.0);
            w = quarter * s;
            x = (m[(2, 1)] - m[(1, 2)]) / s;
            y = (m[(0, 2)] - m[(2, 0)]) / s;
            z = (m[(1, 0)] - m[(0, 1)]) / s;
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (one + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * T::lit(2.0);
            w = (m[(2, 1)] - m[(1, 2)]) / s;
            x = quarter * s;
            y = (m[(0, 1)] + m[(1, 0)]) / s;
            z = (m[(0, 2)] + m[(2, 0)]) / s;
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (one + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * T::lit(2.0);
            w = (m[(0, 2)] - m[(2, 0)]) / s;
            x = (m[(0, 1)] + m[(1, 0)]) / s;
            y = quarter * s;
            z = (m[(1, 2)] + m[(2, 1)]) / s;
        } else {
            let s = (one + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * T::lit(2.0);
            w = (m[(1, 0)] - m[(0, 1)]) / s;
            x = (m[(0, 2)] + m[(2, 0)]) / s;
            y = (m[(1, 2)] + m[(2, 1)]) / s;
            z = quarter * s;
        }
        Self::new_normalize(x, y, z, w).unwrap_or_else(Self::identity)
    }

    pub fn cast<U: Real>(&self) -> Quat<U> {
        Quat::from_raw(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
            U::lit(self.w.to_f64_lossy()),
        )
        .renormalize_if_needed()
    }

    /// Raw component constructor for transforms that provably preserve the
    /// norm (sign flips, permutations).
    pub(crate) fn from_raw(x: T, y: T, z: T, w: T) -> Self {
        Self { x, y, z, w }
    }
}

impl<T: Real> Default for Quat<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Neg for Quat<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
            w: -self.w,
        }
    }
}

impl<T: Real> Mul for Quat<T> {
    type Output = Self;
    /// Hamilton product, renormalized when round-off has accumulated.
    fn mul(self, rhs: Self) -> Self {
        self.mul_raw(&rhs).renormalize_if_needed()
    }
}

/// Spherical linear interpolation along the shortest arc.
///
/// `q1` is negated first when `dot(q0, q1) < 0`. Below a rotation angle of
/// 1e-8 rad the result is the normalized linear blend.
pub fn slerp<T: Real>(q0: &Quat<T>, q1: &Quat<T>, u: T) -> Quat<T> {
    let q1 = if q0.dot(q1) < T::zero() { -*q1 } else { *q1 };
    let a = [q0.x, q0.y, q0.z, q0.w];
    let b = [q1.x, q1.y, q1.z, q1.w];
    let diff = a.iter().zip(&b).map(|(p, q)| (*p - *q) * (*p - *q)).fold(T::zero(), |s, v| s + v);
    let sum = a.iter().zip(&b).map(|(p, q)| (*p + *q) * (*p + *q)).fold(T::zero(), |s, v| s + v);
    // Half of the rotation angle between the two rotations.
    let omega = T::lit(2.0) * diff.sqrt().atan2(sum.sqrt());
    let (wa, wb) = if T::lit(2.0) * omega < T::lit(1e-8) {
        (T::one() - u, u)
    } else {
        let s = omega.sin();
        (((T::one() - u) * omega).sin() / s, (u * omega).sin() / s)
    };
    Quat::new_normalize(
        wa * a[0] + wb * b[0],
        wa * a[1] + wb * b[1],
        wa * a[2] + wb * b[2],
        wa * a[3] + wb * b[3],
    )
    .unwrap_or(*q0)
}

/// Geodesic angle between two rotations in degrees, in `[0, 180]`.
pub fn rotation_angle_deg<T: Real>(q0: &Quat<T>, q1: &Quat<T>) -> T {
    q0.angle_to(q1) * T::lit(180.0 / std::f64::consts::PI)
}
