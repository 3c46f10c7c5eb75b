//! From a few values of `H_n` to the whole Ehrhart polynomial and its volume.
//!
//! `H_n` has degree `d = (n-1)^2`. Besides `H_n(0) = 1`, reciprocity gives
//! zeros at `-1, ..., -(n-1)` and the functional equation
//! `H_n(-n-t) = (-1)^(n-1) H_n(t)`. With `T = (n-1)(n-2)/2` fresh values
//! `H_n(1..T)` these yield `d + 2` points: one more than interpolation needs.
//! The spare point is evaluated as a consistency check on the interpolation.
//!
//! The spare point is the functional-equation image of `H(T)`, and the
//! symmetric polynomials of degree `d` have exactly as many free parameters
//! as the remaining independent constraints. A perturbed value therefore
//! still admits a consistent polynomial, and detection of bad inputs comes
//! from integrality on `-(2n+T)..=T` and from `H(1) = n!`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, parse_rational, ArithError};
use crate::poly::{interpolate, PolyError, Polynomial};
use crate::{Rational, RationalPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("value set for n={n} is missing t={t}")]
    MissingValue { n: usize, t: u32 },
    #[error("value set for n={n} has non-positive H({t}) = {value}")]
    NonPositiveValue { n: usize, t: u32, value: BigInt },
    #[error("consistency check failed at t={t}: polynomial gives {got}, constraint requires {want}")]
    Inconsistent { t: i64, got: String, want: String },
    #[error("polynomial is not integral at t={t}: {value}")]
    NotIntegral { t: i64, value: String },
    #[error("H({n})(1) must be {want} (n!), value set has {got}")]
    PermutationCount { n: usize, want: BigInt, got: BigInt },
    #[error("expected degree {expected}, found {found:?}")]
    DegreeMismatch { expected: usize, found: Option<usize> },
    #[error("structural check {check} failed: {detail}")]
    Structural { check: &'static str, detail: String },
    #[error("malformed result document: {0}")]
    BadDocument(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `T(n) = (n-1)(n-2)/2`, the number of fresh evaluations assembly needs.
pub fn required_value_count(n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    (n - 1) * (n - 2) / 2
}

/// `(n-1)^2`, the dimension of `B_n`.
pub fn ehrhart_degree(n: usize) -> usize {
    let d = n.saturating_sub(1);
    d * d
}

fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

fn functional_sign_negative(n: usize) -> bool {
    n >= 1 && (n - 1) % 2 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Oracle,
    Ct,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Oracle => "oracle",
            Engine::Ct => "ct",
        })
    }
}

/// `H_n(t)` for `t = 1..=T(n)`, optionally with further values beyond `T(n)`
/// which [`assemble`] checks against the polynomial instead of using.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    pub n: usize,
    pub values: BTreeMap<u32, BigInt>,
}

impl ValueSet {
    pub fn new(n: usize, values: BTreeMap<u32, BigInt>) -> Result<Self, AssemblyError> {
        let vs = Self { n, values };
        vs.validate()?;
        Ok(vs)
    }

    /// Takes `H(1), H(2), ...` in order.
    pub fn from_slice(n: usize, values: &[BigInt]) -> Result<Self, AssemblyError> {
        let map = values.iter().enumerate().map(|(i, v)| (i as u32 + 1, v.clone())).collect();
        Self::new(n, map)
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        for t in 1..=required_value_count(self.n) as u32 {
            match self.values.get(&t) {
                None => return Err(AssemblyError::MissingValue { n: self.n, t }),
                Some(v) if !v.is_positive() => {
                    return Err(AssemblyError::NonPositiveValue { n: self.n, t, value: v.clone() })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn get(&self, t: u32) -> BigInt {
        if t == 0 {
            BigInt::one()
        } else {
            self.values[&t].clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EhrhartResult {
    pub n: usize,
    pub poly: RationalPolynomial,
    pub source: Engine,
}

/// Constraint points in their canonical order: anchor, fresh values,
/// reciprocity zeros, then functional-equation images of `t = 0..=T`.
pub fn constraint_points(vs: &ValueSet) -> Vec<(i64, BigInt)> {
    let n = vs.n as i64;
    let big_t = required_value_count(vs.n) as u32;
    let mut pts = vec![(0, BigInt::one())];
    pts.extend((1..=big_t).map(|k| (k as i64, vs.get(k))));
    pts.extend((1..n).map(|j| (-j, BigInt::zero())));
    for k in 0..=big_t {
        let v = vs.get(k);
        let v = if functional_sign_negative(vs.n) { -v } else { v };
        pts.push((-n - k as i64, v));
    }
    pts
}

pub fn assemble(vs: &ValueSet, source: Engine) -> Result<EhrhartResult, AssemblyError> {
    vs.validate()?;
    let n = vs.n;
    let degree = ehrhart_degree(n);
    let big_t = required_value_count(n) as i64;
    let pts: Vec<(Rational, Rational)> = constraint_points(vs)
        .into_iter()
        .map(|(x, y)| (Rational::from_integer(x.into()), Rational::from_integer(y)))
        .collect();
    debug_assert_eq!(pts.len(), degree + 2);

    let poly = interpolate(&pts[..degree + 1])?;
    for (x, want) in &pts[degree + 1..] {
        let got = poly.evaluate(x);
        if &got != want {
            return Err(AssemblyError::Inconsistent {
                t: x.to_integer().try_into().unwrap_or(i64::MIN),
                got: format_rational(&got),
                want: format_rational(want),
            });
        }
    }
    let extras: Vec<(u32, &BigInt)> = vs.values.range(big_t as u32 + 1..).map(|(&t, v)| (t, v)).collect();
    for &(t, v) in &extras {
        let got = poly.evaluate_i64(t as i64);
        if got != Rational::from_integer(v.clone()) {
            return Err(AssemblyError::Inconsistent { t: t as i64, got: format_rational(&got), want: v.to_string() });
        }
    }
    let lo = -(2 * n as i64 + big_t);
    for t in lo..=big_t {
        let v = poly.evaluate_i64(t);
        if !v.is_integer() {
            return Err(AssemblyError::NotIntegral { t, value: format_rational(&v) });
        }
    }
    if poly.degree() != Some(degree) {
        return Err(AssemblyError::DegreeMismatch { expected: degree, found: poly.degree() });
    }
    // The spare point is the mirror image of H(T), so it only guards the
    // interpolation itself; a bad H(1) is caught here instead.
    let perms = factorial(n);
    let at1 = poly.evaluate_i64(1);
    if at1 != Rational::from_integer(perms.clone()) {
        return Err(AssemblyError::PermutationCount { n, want: perms, got: at1.to_integer() });
    }
    Ok(EhrhartResult { n, poly, source })
}

/// Leading coefficient (relative volume) and `leading * n^(n-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeReport {
    pub n: usize,
    pub leading: Rational,
    pub volume: Rational,
}

pub fn volume_from_polynomial(res: &EhrhartResult) -> Result<VolumeReport, AssemblyError> {
    let expected = ehrhart_degree(res.n);
    if res.poly.degree() != Some(expected) {
        return Err(AssemblyError::DegreeMismatch { expected, found: res.poly.degree() });
    }
    let leading = res.poly.leading().expect("nonzero").clone();
    let scale = num_traits::pow(BigInt::from(res.n), res.n.saturating_sub(1));
    let volume = &leading * Rational::from_integer(scale);
    Ok(VolumeReport { n: res.n, leading, volume })
}

/// What [`structural_checks`] verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralReport {
    pub zeros_checked: usize,
    pub functional_points_checked: usize,
}

/// Anchor, reciprocity zeros, functional equation on `t = 0..=2T+2`, and
/// `H(1) = n!`, all exact.
pub fn structural_checks(res: &EhrhartResult) -> Result<StructuralReport, AssemblyError> {
    let n = res.n;
    let p = &res.poly;
    let fail = |check, detail: String| AssemblyError::Structural { check, detail };

    let at0 = p.evaluate_i64(0);
    if !at0.is_one() {
        return Err(fail("poly(0) = 1", format!("poly(0) = {}", format_rational(&at0))));
    }
    for j in 1..n as i64 {
        let v = p.evaluate_i64(-j);
        if !v.is_zero() {
            return Err(fail("reciprocity zero", format!("poly(-{j}) = {}", format_rational(&v))));
        }
    }
    let big_t = required_value_count(n) as i64;
    let neg = functional_sign_negative(n);
    for t in 0..=2 * big_t + 2 {
        let lhs = p.evaluate_i64(-(n as i64) - t);
        let rhs = p.evaluate_i64(t);
        let rhs = if neg { -rhs } else { rhs };
        if lhs != rhs {
            return Err(fail(
                "functional equation",
                format!(
                    "poly({}) = {} but (-1)^(n-1) poly({t}) = {}",
                    -(n as i64) - t,
                    format_rational(&lhs),
                    format_rational(&rhs)
                ),
            ));
        }
    }
    let at1 = p.evaluate_i64(1);
    if at1 != Rational::from_integer(factorial(n)) {
        return Err(fail("poly(1) = n!", format!("poly(1) = {}", format_rational(&at1))));
    }
    Ok(StructuralReport { zeros_checked: n.saturating_sub(1), functional_points_checked: (2 * big_t + 3) as usize })
}

/// The per-run result record: one flat JSON object on one line.
///
/// `wall-time` is only written when requested so that two runs over the same
/// inputs produce byte-identical files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub n: usize,
    pub degree: usize,
    pub coefficients: Vec<String>,
    pub leading: String,
    pub volume: String,
    pub engine: Engine,
    #[serde(rename = "task-count")]
    pub task_count: u64,
    #[serde(rename = "wall-time", default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<String>,
}

impl ResultDocument {
    pub fn new(res: &EhrhartResult, vol: &VolumeReport, task_count: u64) -> Self {
        Self {
            n: res.n,
            degree: res.poly.degree().unwrap_or(0),
            coefficients: res.poly.coeffs().iter().map(format_rational).collect(),
            leading: format_rational(&vol.leading),
            volume: format_rational(&vol.volume),
            engine: res.source,
            task_count,
            wall_time: None,
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, AssemblyError> {
        serde_json::from_str(text.trim()).map_err(|e| AssemblyError::BadDocument(e.to_string()))
    }

    pub fn result(&self) -> Result<EhrhartResult, AssemblyError> {
        let coeffs = self.coefficients.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(EhrhartResult { n: self.n, poly: Polynomial::new(coeffs), source: self.engine })
    }

    pub fn volume(&self) -> Result<Rational, AssemblyError> {
        Ok(parse_rational(&self.volume)?)
    }
}
