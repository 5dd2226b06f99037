//! Floating point abstraction shared by the statistic, sampling and
//! estimation code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for statistic values and parameters: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossless for every integer count this crate produces on realistic
    /// networks (below 2^24 for `f32`, 2^53 for `f64`).
    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as float")
    }

    #[inline]
    fn from_signed(n: i64) -> Self {
        Self::from_i64(n).expect("count representable as float")
    }

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(choose(0, 0), 1);
        assert_eq!(choose(3, 2), 3);
        assert_eq!(choose(2, 3), 0);
        assert_eq!(choose(10, 5), 252);
        assert_eq!(choose(40, 20), 137_846_528_820);
    }

    #[test]
    fn counts_convert_exactly() {
        assert_eq!(<f32 as Scalar>::from_count(16_777_216), 16_777_216.0);
        assert_eq!(<f64 as Scalar>::from_signed(-7), -7.0);
    }
}
