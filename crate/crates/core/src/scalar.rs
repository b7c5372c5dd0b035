//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the algorithms and metrics are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Significant digits needed for a decimal text round trip.
    const ROUND_TRIP_DIGITS: usize;

    /// Converts an `f64` constant. Panics only if the value is unrepresentable,
    /// which cannot happen for finite literals.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Fixed-width scientific notation that parses back to the identical value.
    fn to_exact_string(self) -> String {
        format!("{:.*e}", Self::ROUND_TRIP_DIGITS - 1, self)
    }
}

impl Scalar for f32 {
    const ROUND_TRIP_DIGITS: usize = 9;
}

impl Scalar for f64 {
    const ROUND_TRIP_DIGITS: usize = 17;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_strings_round_trip() {
        for v in [0.1f64, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0] {
            let s = v.to_exact_string();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        for v in [0.1f32, 1.0 / 3.0, 7.0e-30] {
            let s = v.to_exact_string();
            assert_eq!(s.parse::<f32>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn at_least_nine_significant_digits() {
        let s = 0.5f32.to_exact_string();
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert!(mantissa.len() >= 9, "{s}");
    }
}
