use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used for fitness values and runtime formulas: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an integer count.
    #[inline]
    fn of_u64(v: u64) -> Self {
        Self::from_u64(v).expect("every u64 is representable as a float")
    }

    /// Conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `(1 - p)^e` evaluated as `exp(e * ln(1 - p))`, accurate for small `p`.
#[inline]
pub(crate) fn pow_one_minus<T: Scalar>(p: T, e: T) -> T {
    (e * (-p).ln_1p()).exp()
}

/// `1 - (1 - p)^e` without cancellation for small `p`.
#[inline]
pub(crate) fn one_minus_pow_one_minus<T: Scalar>(p: T, e: T) -> T {
    -(e * (-p).ln_1p()).exp_m1()
}
