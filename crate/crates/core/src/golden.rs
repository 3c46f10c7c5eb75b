//! Published reference volumes, kept in `data/` as plain `p/q` text.

use crate::arith::{parse_rational, ArithError};
use crate::Rational;

/// Normalized volume of the 10th Birkhoff polytope as published.
pub const B10_VOLUME: &str = include_str!("../data/b10_volume.txt");

/// Looks up a named golden volume (`"b10"`).
pub fn golden_volume(name: &str) -> Option<Result<Rational, ArithError>> {
    match name {
        "b10" => Some(parse_rational(B10_VOLUME.trim())),
        _ => None,
    }
}
