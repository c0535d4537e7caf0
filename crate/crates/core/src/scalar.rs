//! Scalar abstraction shared by every module.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar the numerics are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Sum
    + Default
    + Send
    + Sync
    + serde::Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Panics only if the literal is not representable,
    /// which cannot happen for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Base step for central finite differences.
    ///
    /// `1e-5` for double precision; single precision needs a larger step
    /// (cube root of epsilon) or cancellation dominates.
    #[inline]
    fn fd_step() -> Self {
        let cbrt_eps = Self::epsilon().cbrt();
        let base = Self::lit(1e-5);
        if cbrt_eps > base {
            cbrt_eps
        } else {
            base
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
