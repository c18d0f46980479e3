//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical core is generic over (`f32` or `f64`).
///
/// The two `*_LO` constants are the rounding residues of `PI` and `LN_2` in
/// the scalar type; together with the leading part they give the
/// double-word constants used by [`crate::specfun::dd`].
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    const PI_LO: Self;
    const LN_2_LO: Self;
    /// Dekker splitting constant `2^ceil(p/2) + 1` for a `p`-bit significand.
    const SPLITTER: Self;
}

impl Real for f64 {
    const PI_LO: f64 = 1.224_646_799_147_353_2e-16;
    const LN_2_LO: f64 = 2.319_046_813_846_299_6e-17;
    const SPLITTER: f64 = 134_217_729.0;
}

impl Real for f32 {
    const PI_LO: f32 = -8.742_278e-8;
    const LN_2_LO: f32 = -1.904_654_2e-9;
    const SPLITTER: f32 = 4097.0;
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
