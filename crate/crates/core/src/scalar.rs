//! Scalar abstraction shared by every numeric module.
//!
//! Pose algebra, solvers and metrics are written once against [`Real`] and
//! instantiated for `f64` (the default used by file I/O and the CLI) and
//! `f32`. Timestamps are always `f64`: Unix-epoch seconds need the extra
//! mantissa regardless of the pose scalar.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the toolkit: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or measurement.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Real scalar")
    }

    /// Widening conversion used for printing and statistics.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real scalars convert to f64")
    }
}

impl<T> Real for T where
    T: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}
