use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used throughout the similarity, extraction and scoring code.
///
/// Implemented for every IEEE float type, so in practice `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless for `f64`, rounding for `f32`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every float type")
    }

    fn of_f32(x: f32) -> Self {
        Self::from_f32(x).expect("f32 is representable in every float type")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Clamp into the closed unit interval.
    fn unit_clamp(self) -> Self {
        self.max(Self::zero()).min(Self::one())
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
