//! Big integer and rational helpers: canonical construction, binomials, and
//! the decimal string forms used in every file and message.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed integer string {0:?}")]
    BadInteger(String),
    #[error("malformed rational string {0:?}")]
    BadRational(String),
}

/// Builds the canonical fraction `num/den`: positive denominator, reduced,
/// zero as `0/1`.
pub fn canonicalize(num: BigInt, den: BigInt) -> Result<BigRational, ArithError> {
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    let g = num.gcd(&den);
    let (mut num, mut den) = (num / &g, den / &g);
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    if num.is_zero() {
        den = BigInt::one();
    }
    Ok(BigRational::new_raw(num, den))
}

/// `C(a, k)`, zero when `k > a`.
pub fn binomial(a: u64, k: u64) -> BigInt {
    if k > a {
        return BigInt::zero();
    }
    let k = k.min(a - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = C(a, i) here; the product stays integral at every step
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

pub fn format_int(v: &BigInt) -> String {
    v.to_str_radix(10)
}

/// Always `p/q`, including `q = 1`, so output width never depends on value.
pub fn format_rational(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Optional leading `-`, then one or more ASCII digits. Nothing else.
pub fn parse_int(s: &str) -> Result<BigInt, ArithError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ArithError::BadInteger(s.to_owned()));
    }
    s.parse::<BigInt>().map_err(|_| ArithError::BadInteger(s.to_owned()))
}

/// Accepts `p/q` or a bare integer; the result is canonical either way.
pub fn parse_rational(s: &str) -> Result<BigRational, ArithError> {
    match s.split_once('/') {
        None => parse_int(s).map(BigRational::from_integer).map_err(|_| ArithError::BadRational(s.to_owned())),
        Some((n, d)) => {
            let bad = || ArithError::BadRational(s.to_owned());
            let num = parse_int(n).map_err(|_| bad())?;
            let den = parse_int(d).map_err(|_| bad())?;
            canonicalize(num, den)
        }
    }
}
