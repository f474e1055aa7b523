//! Scalar abstraction shared by every signal-level module.
//!
//! The DSP code is written once against [`Real`] and instantiated for `f32`
//! and `f64`. Frequencies, sample rates and wall-clock quantities stay in
//! `f64` regardless of the sample scalar, since they routinely exceed the
//! precision of `f32` (a 2.4 GHz center frequency, for example).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point sample type: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Converts an `f64` literal or metadata value into this scalar.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Real type")
    }

    /// Lossy conversion back to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real always converts to f64")
    }

    /// `2π`.
    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac<T: Real>(x: T) -> T {
    let f = x - x.floor();
    // `x - floor(x)` can round up to exactly 1 for tiny negative `x`.
    if f >= T::one() {
        T::zero()
    } else {
        f
    }
}
