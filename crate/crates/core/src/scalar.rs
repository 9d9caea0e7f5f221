//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for p-values and critical values: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the target type cannot
    /// represent finite values at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Floor of a finite value as `i64`. Saturates for values outside the range.
pub(crate) fn floor_i64<T: Real>(x: T) -> i64 {
    let f = x.floor();
    if f >= T::lit(i64::MAX as f64) {
        i64::MAX
    } else if f <= T::lit(i64::MIN as f64) {
        i64::MIN
    } else {
        f.to_i64().unwrap_or(0)
    }
}
