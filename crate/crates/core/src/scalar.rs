//! Scalar abstraction shared by every numeric module.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the engine can run on (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or parameter into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        // f64 -> f32/f64 never fails for finite inputs; infinities map through.
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Uniform value in `[0, 1)` from the top bits of a 64-bit hash.
    #[inline]
    fn unit(bits: u64) -> Self {
        Self::lit((bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
    }
}

impl Real for f32 {
    #[inline]
    fn unit(bits: u64) -> Self {
        // 24 bits so the result stays strictly below 1 after rounding.
        (bits >> 40) as f32 * (1.0 / (1u32 << 24) as f32)
    }
}

impl Real for f64 {}
