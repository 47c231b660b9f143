use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use super::poly::Polynomial;
use crate::error::{HolifdError, Result};
use crate::scalar::{format_rational, parse_rational, Scalar};

/// Which piece answers an evaluation request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Interior,
    /// Limit from smaller `x`; at `xi = -1/2` this is the previous element's piece.
    LeftLimit,
    /// Limit from larger `x`; at `xi = +1/2` this is the next element's piece.
    RightLimit,
}

/// A field that is a polynomial in `xi` on each element of its support and
/// zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseField<S> {
    m: usize,
    h: S,
    pieces: BTreeMap<usize, Polynomial<S>>,
}

impl<S: Scalar> PiecewiseField<S> {
    pub fn new(m: usize, h: S) -> Self {
        Self { m, h, pieces: BTreeMap::new() }
    }

    /// The characteristic function of element `j`.
    pub fn characteristic(m: usize, h: S, j: usize) -> Self {
        let mut f = Self::new(m, h);
        f.set_piece(j, Polynomial::constant(S::one()));
        f
    }

    /// The same polynomial on every element.
    pub fn uniform(m: usize, h: S, p: Polynomial<S>) -> Self {
        let mut f = Self::new(m, h);
        for j in 0..m {
            f.set_piece(j, p.clone());
        }
        f
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> &S {
        &self.h
    }

    pub fn wrap(&self, j: i64) -> usize {
        j.rem_euclid(self.m as i64) as usize
    }

    pub fn set_piece(&mut self, j: usize, p: Polynomial<S>) {
        let j = j % self.m;
        if p.is_zero() {
            self.pieces.remove(&j);
        } else {
            self.pieces.insert(j, p);
        }
    }

    /// Adds `p` to the piece on element `j`.
    pub fn add_to_piece(&mut self, j: usize, p: &Polynomial<S>) {
        let j = j % self.m;
        let sum = match self.pieces.get(&j) {
            Some(q) => q.add(p),
            None => p.clone(),
        };
        self.set_piece(j, sum);
    }

    pub fn piece(&self, j: usize) -> Option<&Polynomial<S>> {
        self.pieces.get(&(j % self.m))
    }

    pub fn piece_or_zero(&self, j: usize) -> Polynomial<S> {
        self.piece(j).cloned().unwrap_or_else(Polynomial::zero)
    }

    pub fn pieces(&self) -> impl Iterator<Item = (usize, &Polynomial<S>)> {
        self.pieces.iter().map(|(&j, p)| (j, p))
    }

    pub fn support(&self) -> Vec<usize> {
        self.pieces.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.h != other.h {
            return Err(HolifdError::GridMismatch(format!(
                "fields on {} elements (h = {:?}) and {} elements (h = {:?})",
                self.m, self.h, other.m, other.h
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, j: usize, xi: &S, side: Side) -> Result<S> {
        let x = xi.to_f64();
        if !(-0.5..=0.5).contains(&x) {
            return Err(HolifdError::CoordinateOutOfRange(x));
        }
        let half = S::from_ratio(1, 2);
        let (element, at) = match side {
            Side::LeftLimit if *xi == -half.clone() => (self.wrap(j as i64 - 1), half),
            Side::RightLimit if *xi == half => (self.wrap(j as i64 + 1), -half),
            _ => (j % self.m, xi.clone()),
        };
        Ok(self.piece(element).map(|p| p.eval(&at)).unwrap_or_else(S::zero))
    }

    /// `d/dx`, i.e. `(1/h) d/dxi` on every piece.
    pub fn diff(&self) -> Self {
        let inv_h = S::one() / self.h.clone();
        let mut out = Self::new(self.m, self.h.clone());
        for (&j, p) in &self.pieces {
            out.set_piece(j, p.derivative().scale(&inv_h));
        }
        out
    }

    /// `int over element j of f dx`.
    pub fn integrate_element(&self, j: usize) -> S {
        self.piece(j).map(|p| p.integral() * self.h.clone()).unwrap_or_else(S::zero)
    }

    /// `int over the whole domain of f dx`.
    pub fn integrate(&self) -> S {
        self.pieces.values().fold(S::zero(), |acc, p| acc + p.integral()) * self.h.clone()
    }

    fn edge_values(&self, j: usize) -> (S, S) {
        let half = S::from_ratio(1, 2);
        let left = self.piece(j).map(|p| p.eval(&half)).unwrap_or_else(S::zero);
        let right = self
            .piece(self.wrap(j as i64 + 1))
            .map(|p| p.eval(&-half))
            .unwrap_or_else(S::zero);
        (left, right)
    }

    /// Right limit minus left limit at the edge between elements `j` and `j+1`.
    pub fn jump(&self, j: usize) -> S {
        let (left, right) = self.edge_values(j);
        right - left
    }

    /// Average of the two one-sided limits at the edge between `j` and `j+1`.
    pub fn mean(&self, j: usize) -> S {
        let (left, right) = self.edge_values(j);
        (left + right) / S::from_int(2)
    }

    /// `<self, other> = (1/h) int self * other dx`.
    pub fn inner(&self, other: &Self) -> Result<S> {
        self.check_compatible(other)?;
        let (small, large) =
            if self.pieces.len() <= other.pieces.len() { (self, other) } else { (other, self) };
        Ok(small.pieces.iter().fold(S::zero(), |acc, (j, p)| match large.pieces.get(j) {
            Some(q) => acc + p.integral_product(q),
            None => acc,
        }))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&j, p) in &other.pieces {
            out.add_to_piece(j, p);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::new(self.m, self.h.clone());
        for (&j, p) in &self.pieces {
            out.set_piece(j, p.scale(s));
        }
        out
    }

    /// Translates the field by `offset` elements (periodically).
    pub fn shift(&self, offset: i64) -> Self {
        let mut out = Self::new(self.m, self.h.clone());
        for (&j, p) in &self.pieces {
            out.set_piece(self.wrap(j as i64 + offset), p.clone());
        }
        out
    }

    pub fn map<T: Scalar>(&self, h: T, f: impl Fn(&S) -> T) -> PiecewiseField<T> {
        let mut out = PiecewiseField::new(self.m, h);
        for (&j, p) in &self.pieces {
            out.set_piece(j, p.map(&f));
        }
        out
    }

    pub fn to_f64(&self) -> PiecewiseField<f64> {
        self.map(self.h.to_f64(), |c| c.to_f64())
    }

    /// Samples the field at `samples` uniformly spaced points per element,
    /// `xi = -1/2 + i/samples`, returning `(element, xi, value)`.
    pub fn sample_f64(&self, samples: usize) -> Vec<(usize, f64, f64)> {
        let f = self.to_f64();
        let mut out = Vec::with_capacity(self.m * samples);
        for j in 0..self.m {
            let piece = f.piece(j);
            for i in 0..samples {
                let xi = -0.5 + i as f64 / samples as f64;
                out.push((j, xi, piece.map(|p| p.eval(&xi)).unwrap_or(0.0)));
            }
        }
        out
    }
}

/// Scalars that serialize into the field JSON format.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => parse_rational(s).map(|r| r.to_f64()),
            _ => None,
        }
    }
}

impl JsonScalar for BigRational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(i.into())),
            _ => None,
        }
    }
}

impl<S: JsonScalar> PiecewiseField<S> {
    /// `{"m": .., "h": .., "pieces": {"<element>": [c0, c1, ..]}}`.
    pub fn to_json(&self) -> Value {
        self.to_json_relative(None)
    }

    /// As [`Self::to_json`] but keyed by signed offset from `centre`
    /// (minimal periodic image) when given.
    pub fn to_json_relative(&self, centre: Option<usize>) -> Value {
        let mut pieces = Map::new();
        let mut entries: Vec<(i64, &Polynomial<S>)> = self
            .pieces
            .iter()
            .map(|(&j, p)| {
                let key = match centre {
                    Some(c) => {
                        let m = self.m as i64;
                        let d = (j as i64 - c as i64).rem_euclid(m);
                        if d >= (m + 1) / 2 {
                            d - m
                        } else {
                            d
                        }
                    }
                    None => j as i64,
                };
                (key, p)
            })
            .collect();
        entries.sort_by_key(|(k, _)| *k);
        for (key, p) in entries {
            pieces.insert(key.to_string(), Value::Array(p.coeffs().iter().map(|c| c.to_json()).collect()));
        }
        json!({ "m": self.m, "h": self.h.to_json(), "pieces": pieces })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: &str| HolifdError::InvalidConfig(format!("piecewise field JSON: {msg}"));
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| bad("missing m"))? as usize;
        if m == 0 {
            return Err(bad("m must be positive"));
        }
        let h = v.get("h").and_then(S::from_json).ok_or_else(|| bad("missing or malformed h"))?;
        let mut field = Self::new(m, h);
        let pieces = v.get("pieces").and_then(Value::as_object).ok_or_else(|| bad("missing pieces"))?;
        for (key, coeffs) in pieces {
            let j: i64 = key.parse().map_err(|_| bad("piece keys must be integers"))?;
            let coeffs = coeffs
                .as_array()
                .ok_or_else(|| bad("piece must be a coefficient list"))?
                .iter()
                .map(|c| S::from_json(c).ok_or_else(|| bad("malformed coefficient")))
                .collect::<Result<Vec<_>>>()?;
            field.add_to_piece(field.wrap(j), &Polynomial::new(coeffs)?);
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    const M: usize = 8;

    fn chi(j: usize) -> PiecewiseField<BigRational> {
        PiecewiseField::characteristic(M, rat(1, 1), j)
    }

    #[test]
    fn characteristic_evaluation() {
        let f = chi(3);
        assert_eq!(f.evaluate(3, &rat(0, 1), Side::Interior).unwrap(), rat(1, 1));
        assert_eq!(f.evaluate(4, &rat(0, 1), Side::Interior).unwrap(), rat(0, 1));
        assert!(f.evaluate(3, &rat(3, 4), Side::Interior).is_err());
        // limits at the edges pick the neighbouring piece
        assert_eq!(f.evaluate(4, &rat(-1, 2), Side::LeftLimit).unwrap(), rat(1, 1));
        assert_eq!(f.evaluate(4, &rat(-1, 2), Side::RightLimit).unwrap(), rat(0, 1));
        assert_eq!(f.evaluate(3, &rat(1, 2), Side::RightLimit).unwrap(), rat(0, 1));
    }

    #[test]
    fn projector_piece_value() {
        let mut f = PiecewiseField::new(M, rat(1, 1));
        f.set_piece(2, Polynomial::new(vec![rat(7, 6), rat(0, 1), rat(-1, 1)]).unwrap());
        assert_eq!(f.evaluate(2, &rat(1, 2), Side::Interior).unwrap(), rat(11, 12));
        assert_eq!(f.inner(&chi(2)).unwrap(), rat(13, 12));
    }

    #[test]
    fn inner_product_basics() {
        assert_eq!(chi(5).inner(&chi(5)).unwrap(), rat(1, 1));
        assert_eq!(chi(5).inner(&chi(6)).unwrap(), rat(0, 1));
        let one = PiecewiseField::uniform(M, rat(1, 1), Polynomial::constant(rat(1, 1)));
        assert_eq!(chi(0).inner(&one).unwrap(), rat(1, 1));
        let other = PiecewiseField::characteristic(M + 1, rat(1, 1), 0);
        assert!(chi(0).inner(&other).is_err());
    }

    #[test]
    fn jump_mean_diff() {
        let f = chi(3);
        assert_eq!(f.jump(3), rat(-1, 1));
        assert_eq!(f.mean(3), rat(1, 2));
        assert_eq!(f.jump(2), rat(1, 1));
        let h = rat(1, 4);
        let mut g = PiecewiseField::new(M, h);
        g.set_piece(3, Polynomial::monomial(rat(1, 1), 1));
        assert_eq!(g.diff().evaluate(3, &rat(1, 10), Side::Interior).unwrap(), rat(4, 1));
    }

    #[test]
    fn json_round_trip_exact() {
        let mut f = PiecewiseField::new(M, rat(1, 2));
        f.set_piece(7, Polynomial::new(vec![rat(-1, 12), rat(1, 2), rat(1, 2)]).unwrap());
        f.set_piece(0, Polynomial::new(vec![rat(7, 6), rat(0, 1), rat(-1, 1)]).unwrap());
        let v = f.to_json();
        assert_eq!(v["pieces"]["7"][0], "-1/12");
        assert_eq!(PiecewiseField::<BigRational>::from_json(&v).unwrap(), f);
        let rel = f.to_json_relative(Some(0));
        assert_eq!(rel["pieces"]["-1"][1], "1/2");
    }

    fn random_field(seed: &[f64]) -> (PiecewiseField<f64>, PiecewiseField<BigRational>) {
        let mut ff = PiecewiseField::new(M, 0.5);
        let mut fr = PiecewiseField::new(M, rat(1, 2));
        for (j, chunk) in seed.chunks(7).enumerate() {
            let ints: Vec<i64> = chunk.iter().map(|c| (c * 64.0).round() as i64).collect();
            fr.set_piece(j, Polynomial::new(ints.iter().map(|&i| rat(i, 64)).collect()).unwrap());
            ff.set_piece(j, Polynomial::new(ints.iter().map(|&i| i as f64 / 64.0).collect()).unwrap());
        }
        (ff, fr)
    }

    proptest! {
        #[test]
        fn backends_agree(a in proptest::collection::vec(-4.0f64..4.0, 56),
                          b in proptest::collection::vec(-4.0f64..4.0, 56),
                          xi in -0.5f64..0.5) {
            let (af, ar) = random_field(&a);
            let (bf, br) = random_field(&b);
            let close = |x: f64, y: &BigRational| (x - y.to_f64()).abs() <= 1e-12 * (1.0 + x.abs());
            prop_assert!(close(af.inner(&bf).unwrap(), &ar.inner(&br).unwrap()));
            for j in 0..M {
                prop_assert!(close(af.jump(j), &ar.jump(j)));
                prop_assert!(close(af.mean(j), &ar.mean(j)));
                prop_assert!(close(af.integrate_element(j), &ar.integrate_element(j)));
                let xr = rat((xi * 1024.0).round() as i64, 1024);
                let xf = xr.to_f64();
                prop_assert!(close(af.diff().evaluate(j, &xf, Side::Interior).unwrap(),
                                   &ar.diff().evaluate(j, &xr, Side::Interior).unwrap()));
            }
        }

        #[test]
        fn inner_product_is_bilinear(a in proptest::collection::vec(-4.0f64..4.0, 56),
                                     b in proptest::collection::vec(-4.0f64..4.0, 56),
                                     s in -3.0f64..3.0) {
            let (af, _) = random_field(&a);
            let (bf, _) = random_field(&b);
            let lhs = af.scale(&s).add(&bf).unwrap().inner(&bf).unwrap();
            let rhs = s * af.inner(&bf).unwrap() + bf.inner(&bf).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn matching_edges_have_no_jump(c in -5.0f64..5.0, slope in -5.0f64..5.0) {
            // neighbouring linear pieces that meet at the shared edge
            let mut f = PiecewiseField::new(M, 1.0);
            f.set_piece(2, Polynomial::new(vec![c, slope]).unwrap());
            f.set_piece(3, Polynomial::new(vec![c + slope, slope]).unwrap());
            prop_assert!(f.jump(2).abs() < 1e-12);
            prop_assert!((f.mean(2) - (c + 0.5 * slope)).abs() < 1e-12);
        }
    }
}
