//! Scalar backends shared by the polynomial calculus.
//!
//! Every formula in the crate is written once against [`Scalar`] and then
//! evaluated either in `f64` or in exact [`BigRational`] arithmetic. The
//! [`Dual`] number wraps either backend and carries one directional
//! derivative, which is how tangent vectors and chain-rule time derivatives
//! of the subgrid field are obtained without hand-differentiating.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Convenience constructor for exact rationals.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::from_ratio(p, q)
}

/// Formats an exact rational as `"p/q"` (or `"p"` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if Zero::is_zero(&q) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Forward-mode dual number `value + eps * deriv` with `eps^2 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub value: S,
    pub deriv: S,
}

impl<S: Scalar> Dual<S> {
    pub fn constant(value: S) -> Self {
        Self { value, deriv: S::zero() }
    }

    pub fn variable(value: S, deriv: S) -> Self {
        Self { value, deriv }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { value: self.value + rhs.value, deriv: self.deriv + rhs.deriv }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { value: self.value - rhs.value, deriv: self.deriv - rhs.deriv }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let deriv = self.value.clone() * rhs.deriv + self.deriv * rhs.value.clone();
        Self { value: self.value * rhs.value, deriv }
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let denom = rhs.value.clone() * rhs.value.clone();
        let deriv = (self.deriv * rhs.value.clone() - self.value.clone() * rhs.deriv) / denom;
        Self { value: self.value / rhs.value, deriv }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, deriv: -self.deriv }
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn zero() -> Self {
        Self::constant(S::zero())
    }
    fn one() -> Self {
        Self::constant(S::one())
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Self::constant(S::from_ratio(p, q))
    }
    fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.deriv.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip_text() {
        let r = rat(-7, 6);
        assert_eq!(format_rational(&r), "-7/6");
        assert_eq!(parse_rational("-7/6"), Some(r));
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn dual_product_rule() {
        // d/dx (x^3 - 2x) at x = 3/2 is 27/4 - 2
        let x = Dual::variable(rat(3, 2), rat(1, 1));
        let y = x.clone() * x.clone() * x.clone() - Dual::from_int(2) * x;
        assert_eq!(y.value, rat(27, 8) - rat(3, 1));
        assert_eq!(y.deriv, rat(27, 4) - rat(2, 1));
    }
}
