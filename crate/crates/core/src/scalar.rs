//! Scalar traits the generic numeric code is written against.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, One, Signed, Zero};

/// An exact field: everything the polynomial and interpolation code needs.
///
/// Implemented for `Ratio<T>` over any signed integer backing type, so the
/// same code runs on `BigRational` (production) and `Ratio<i64>` / `Ratio<i128>`
/// (quick tests where overflow is impossible by construction).
pub trait Field: Clone + PartialEq + Num + std::ops::Neg<Output = Self> + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;

    /// True when the value has no fractional part.
    fn is_integral(&self) -> bool;
}

impl<T> Field for Ratio<T>
where
    T: Clone + num_integer::Integer + Signed + From<i64> + std::fmt::Debug,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(T::from(v))
    }

    fn is_integral(&self) -> bool {
        self.denom().is_one()
    }
}

/// Integer counts accumulated by the oracle DP.
///
/// `BigInt` is the default; `u64`/`u128` are accepted for throwaway runs
/// where the caller knows the count fits.
pub trait Count: Clone + Zero + One + std::ops::AddAssign + std::fmt::Debug {}

impl Count for BigInt {}
impl Count for u64 {}
impl Count for u128 {}
