use std::fmt;

use crate::error::{HolifdError, Result};
use crate::scalar::Scalar;

pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Polynomial `c_0 + c_1 xi + ... + c_d xi^d` in the local coordinate.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients at all and two equal exact polynomials compare equal.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        let p = Self::from_coeffs_unchecked(coeffs);
        if p.degree() > DEFAULT_DEGREE_CAP {
            return Err(HolifdError::DegreeCap { degree: p.degree(), cap: DEFAULT_DEGREE_CAP });
        }
        Ok(p)
    }

    pub(crate) fn from_coeffs_unchecked(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_coeffs_unchecked(vec![c])
    }

    /// `c xi^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs_unchecked(coeffs)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `xi^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, xi: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * xi.clone() + c.clone())
    }

    /// `d/dxi`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * S::from_int(k as i64))
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    /// Antiderivative vanishing at `xi = 0`.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(S::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / S::from_int(k as i64 + 1));
        }
        Self::from_coeffs_unchecked(coeffs)
    }

    /// `int_{-1/2}^{1/2} xi^k dxi`.
    pub fn monomial_integral(k: usize) -> S {
        if k % 2 == 1 {
            S::zero()
        } else {
            S::one() / (S::from_int(k as i64 + 1) * S::from_int(2).powi(k as u32))
        }
    }

    /// `int_{-1/2}^{1/2} p(xi) dxi`.
    pub fn integral(&self) -> S {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .fold(S::zero(), |acc, (k, c)| acc + c.clone() * Self::monomial_integral(k))
    }

    /// `int_{-1/2}^{1/2} p(xi) q(xi) dxi` without forming the product.
    pub fn integral_product(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if (i + j) % 2 == 0 {
                    acc = acc + a.clone() * b.clone() * Self::monomial_integral(i + j);
                }
            }
        }
        acc
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_coeffs_unchecked(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs_unchecked((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs_unchecked((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let degree = self.degree() + other.degree();
        if degree > DEFAULT_DEGREE_CAP {
            return Err(HolifdError::DegreeCap { degree, cap: DEFAULT_DEGREE_CAP });
        }
        let mut coeffs = vec![S::zero(); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Self::from_coeffs_unchecked(coeffs))
    }

    /// `p(-xi)`.
    pub fn mirror(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial::from_coeffs_unchecked(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map(|c| c.to_f64())
    }
}

impl<S: fmt::Debug> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial")?;
        f.debug_list().entries(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    fn p(c: &[(i64, i64)]) -> Polynomial<BigRational> {
        Polynomial::new(c.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn trims_trailing_zeros() {
        let q = p(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(q.degree(), 0);
        assert_eq!(q, Polynomial::constant(rat(1, 1)));
    }

    #[test]
    fn centre_piece_values() {
        // 7/6 - xi^2
        let q = p(&[(7, 6), (0, 1), (-1, 1)]);
        assert_eq!(q.eval(&rat(1, 2)), rat(11, 12));
        assert_eq!(q.integral(), rat(13, 12));
    }

    #[test]
    fn calculus_identities() {
        let q = p(&[(1, 3), (-2, 1), (5, 4), (1, 7)]);
        assert_eq!(q.antiderivative().derivative(), q);
        let a = q.antiderivative();
        assert_eq!(q.integral(), a.eval(&rat(1, 2)) - a.eval(&rat(-1, 2)));
        let r = p(&[(0, 1), (1, 1), (3, 2)]);
        assert_eq!(q.integral_product(&r), q.mul(&r).unwrap().integral());
        assert_eq!(q.mirror().eval(&rat(1, 3)), q.eval(&rat(-1, 3)));
    }

    #[test]
    fn degree_cap_enforced() {
        let q = Polynomial::monomial(rat(1, 1), 5);
        assert!(q.mul(&q).is_err());
        assert!(Polynomial::new(vec![rat(1, 1); 10]).is_err());
    }
}
