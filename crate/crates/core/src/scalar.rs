use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating type used to accumulate character sums.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every float type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

pub type ComplexValue<T> = num_complex::Complex<T>;

/// 2^-40: per-term rounding allowance of the tolerance policy.
pub const TOLERANCE_UNIT: f64 = 1.0 / (1u64 << 40) as f64;

/// Absolute tolerance for a double-precision sum of `terms` values of modulus at most `bound`.
pub fn sum_tolerance(terms: u64, bound: f64) -> f64 {
    TOLERANCE_UNIT * terms as f64 * bound
}
