//! Exact Ehrhart polynomials of Birkhoff polytopes.
//!
//! `H_n(t)` counts the `n x n` nonnegative integer matrices whose rows and
//! columns all sum to `t`. It is a polynomial of degree `(n-1)^2` in `t`.
//! This crate provides two independent ways to compute it:
//!
//! * [`oracle`]: a column-by-column transfer DP plus a naive enumerator.
//! * [`ct`]: a constant-term decomposition into independent integer tasks,
//!   one per weak composition of `n`, which is the unit of distribution.
//!
//! [`assembly`] turns a handful of values into the full polynomial using
//! reciprocity zeros and the functional equation, with one redundant point
//! kept back as a self-check, and extracts the normalized volume.
//!
//! Polynomial and interpolation code is generic over the coefficient field
//! (see [`scalar::Field`]); the aliases below fix it to exact rationals.

pub mod arith;
pub mod assembly;
pub mod ct;
pub mod golden;
pub mod oracle;
pub mod poly;
pub mod scalar;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// The universal exact scalar.
pub type Rational = BigRational;

/// Dense polynomial with exact rational coefficients.
pub type RationalPolynomial = poly::Polynomial<Rational>;

pub use arith::{binomial, canonicalize, format_int, format_rational, parse_int, parse_rational, ArithError};
pub use assembly::{
    assemble, required_value_count, structural_checks, volume_from_polynomial, AssemblyError, EhrhartResult, Engine,
    ResultDocument, ValueSet, VolumeReport,
};
pub use ct::{
    composition_count, composition_rank, composition_unrank, ct_count, term_value, CompositionTask, CtError, TaskId,
    TaskValue,
};
pub use oracle::{count_dp, count_naive, count_series, EhrhartInstance};
pub use poly::{interpolate, PolyError, Polynomial};
