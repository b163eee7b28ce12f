//! Rigid-body pose algebra.

mod pose;
mod quat;
mod rotvec;

pub use pose::{compose, interpolate_pose, inverse, lhs_to_rhs, Pose};
pub use quat::{rotation_angle_deg, slerp, Quat};
pub use rotvec::{quat_to_rotvec, rotvec_to_quat, RotVec};

/// Coordinate-system handedness tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Handedness {
    Left,
    Right,
}

impl Handedness {
    pub fn mirrored(self) -> Self {
        match self {
            Handedness::Left => Handedness::Right,
            Handedness::Right => Handedness::Left,
        }
    }
}
