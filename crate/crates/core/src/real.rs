//! Scalar abstraction for the sample domain.
//!
//! All signal and grid math is generic over the floating-point type; `f64`
//! matches the double precision the pipeline is specified against, `f32`
//! trades accuracy for memory.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point sample type: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

/// Lossy-but-total conversion from `f64`; every scalar we accept can
/// represent (a rounding of) any finite `f64`.
pub(crate) fn from_f64<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("finite f64 converts to Real")
}

pub(crate) fn from_u32<T: Real>(v: u32) -> T {
    T::from_u32(v).expect("u32 converts to Real")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_lanes_implement_real() {
        fn takes_real<T: Real>(x: T) -> T {
            x
        }
        assert_eq!(takes_real(1.5f32), 1.5f32);
        assert_eq!(takes_real(1.5f64), 1.5f64);
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        // The whole pipeline leans on this tie-break rule.
        assert_eq!(from_f64::<f64>(127.5).round(), 128.0);
        assert_eq!(from_f64::<f64>(-127.5).round(), -128.0);
        assert_eq!(from_f64::<f32>(0.5).round(), 1.0f32);
        assert_eq!(from_f64::<f32>(-0.5).round(), -1.0f32);
    }
}
