//! Dense univariate polynomials over an exact field, and Newton interpolation.

use crate::scalar::Field;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("interpolation needs at least one point")]
    NoPoints,
    #[error("duplicate abscissa at positions {0} and {1}")]
    DuplicateAbscissa(usize, usize),
}

/// Coefficients in ascending degree, trailing zeros trimmed. The zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Field> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> T {
        self.coeffs.first().cloned().unwrap_or_else(T::zero)
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn evaluate_i64(&self, x: i64) -> T {
        self.evaluate(&T::from_i64(x))
    }

    /// `self * (x - root)`.
    fn mul_linear(&self, root: &T) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1] = out[i + 1].clone() + c.clone();
            out[i] = out[i].clone() - c.clone() * root.clone();
        }
        Self::new(out)
    }

    fn add_constant(mut self, c: T) -> Self {
        if self.coeffs.is_empty() {
            return Self::new(vec![c]);
        }
        self.coeffs[0] = self.coeffs[0].clone() + c;
        Self::new(self.coeffs)
    }
}

/// Newton divided-difference coefficients for the given nodes, in place.
///
/// Returns `d` with `p(x) = d0 + d1 (x - x0) + d2 (x - x0)(x - x1) + ...`.
pub fn divided_differences<T: Field>(xs: &[T], ys: &[T]) -> Vec<T> {
    let mut d = ys.to_vec();
    for level in 1..xs.len() {
        for i in (level..xs.len()).rev() {
            let num = d[i].clone() - d[i - 1].clone();
            let den = xs[i].clone() - xs[i - level].clone();
            d[i] = num / den;
        }
    }
    d
}

/// The unique polynomial of degree `< points.len()` through every point.
pub fn interpolate<T: Field>(points: &[(T, T)]) -> Result<Polynomial<T>, PolyError> {
    if points.is_empty() {
        return Err(PolyError::NoPoints);
    }
    for i in 0..points.len() {
        for j in 0..i {
            if points[i].0 == points[j].0 {
                return Err(PolyError::DuplicateAbscissa(j, i));
            }
        }
    }
    let (xs, ys): (Vec<T>, Vec<T>) = points.iter().cloned().unzip();
    let d = divided_differences(&xs, &ys);

    let mut p = Polynomial::zero();
    for k in (0..d.len()).rev() {
        p = p.mul_linear(&xs[k]).add_constant(d[k].clone());
    }
    Ok(p)
}
