//! Periodic element lattice.

use serde::{Deserialize, Serialize};

use crate::error::{HolifdError, Result};

/// A periodic lattice of `m` equal elements of width `h`.
///
/// Element `j` is centred on `x_j = origin + j h` and occupies the half-open
/// interval `[x_j - h/2, x_j + h/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    m: usize,
    h: f64,
    #[serde(default)]
    origin: f64,
}

impl Grid {
    pub const MIN_ELEMENTS: usize = 4;

    pub fn new(m: usize, h: f64, origin: f64) -> Result<Self> {
        if m < Self::MIN_ELEMENTS {
            return Err(HolifdError::InvalidConfig(format!(
                "grid needs at least {} elements, got {m}",
                Self::MIN_ELEMENTS
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(HolifdError::InvalidConfig(format!("element width must be positive, got {h}")));
        }
        if !origin.is_finite() {
            return Err(HolifdError::InvalidConfig("grid origin must be finite".into()));
        }
        Ok(Self { m, h, origin })
    }

    /// Grid of `m` elements spanning a domain of length `length`.
    pub fn with_length(m: usize, length: f64) -> Result<Self> {
        Self::new(m, length / m as f64, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.m, self.h, self.origin).map(|_| ())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn length(&self) -> f64 {
        self.m as f64 * self.h
    }

    /// Centre `x_j` of element `j` (not reduced modulo the domain length).
    pub fn centre(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.h
    }

    /// Periodic index reduction into `[0, m)`.
    pub fn wrap(&self, j: i64) -> usize {
        j.rem_euclid(self.m as i64) as usize
    }

    /// Signed offset `n - k` reduced into `[-m/2, m/2)`: the minimal-distance
    /// image of element `n` as seen from element `k`.
    pub fn offset(&self, n: usize, k: usize) -> i64 {
        let m = self.m as i64;
        let d = (n as i64 - k as i64).rem_euclid(m);
        if d >= (m + 1) / 2 {
            d - m
        } else {
            d
        }
    }

    /// Element index and local coordinate `xi = (x - x_j)/h` in `[-1/2, 1/2)`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let r = (x - self.origin) / self.h;
        let j = (r + 0.5).floor();
        let mut xi = r - j;
        let mut j = j as i64;
        // Rounding in `r - j` may land just outside the half-open interval.
        if xi >= 0.5 {
            xi -= 1.0;
            j += 1;
        } else if xi < -0.5 {
            xi += 1.0;
            j -= 1;
        }
        (self.wrap(j), xi)
    }

    /// Coordinate of the point at local coordinate `xi` in element `j`.
    pub fn position(&self, j: usize, xi: f64) -> f64 {
        self.centre(j) + self.h * xi
    }
}

/// The model amplitudes `u_j`, one per element.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    u: Vec<f64>,
}

impl GridState {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(HolifdError::NonFinite(format!("state entry {i} is {}", u[i])));
        }
        Ok(Self { u })
    }

    pub fn for_grid(grid: &Grid, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.m() {
            return Err(HolifdError::GridMismatch(format!(
                "state has {} entries for a {}-element grid",
                u.len(),
                grid.m()
            )));
        }
        Self::new(u)
    }

    pub fn zeros(m: usize) -> Self {
        Self { u: vec![0.0; m] }
    }

    pub fn constant(m: usize, value: f64) -> Self {
        Self { u: vec![value; m] }
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn into_values(self) -> Vec<f64> {
        self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &GridState) -> f64 {
        self.u.iter().zip(&other.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for GridState {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.u[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::new(8, 0.5, 0.0).unwrap()
    }

    #[test]
    fn locate_examples() {
        let g = grid();
        assert_eq!(g.locate(g.centre(3)), (3, 0.0));
        assert_eq!(g.locate(g.centre(3) + g.h() / 4.0), (3, 0.25));
        assert_eq!(g.locate(g.centre(3) + g.h() / 2.0), (4, -0.5));
    }

    #[test]
    fn wrap_examples() {
        let g = grid();
        assert_eq!(g.wrap(-1), 7);
        assert_eq!(g.wrap(8), 0);
        assert_eq!(g.wrap(3), 3);
    }

    #[test]
    fn offset_is_minimal_image() {
        let g = grid();
        assert_eq!(g.offset(7, 0), -1);
        assert_eq!(g.offset(1, 7), 2);
        assert_eq!(g.offset(4, 0), -4);
        assert_eq!(g.offset(3, 0), 3);
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid::new(3, 1.0, 0.0).is_err());
        assert!(Grid::new(8, 0.0, 0.0).is_err());
        assert!(Grid::new(8, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn state_rejects_non_finite() {
        assert!(GridState::new(vec![0.0, f64::INFINITY]).is_err());
        let g = grid();
        assert!(GridState::for_grid(&g, vec![0.0; 7]).is_err());
    }

    proptest! {
        #[test]
        fn locate_round_trip(j in 0usize..8, xi in -0.5f64..0.5) {
            let g = Grid::new(8, 0.75, -1.25).unwrap();
            let (k, eta) = g.locate(g.position(j, xi));
            let same = (k == j && (eta - xi).abs() < 1e-9)
                // xi within rounding of +1/2 may legitimately roll into j+1
                || (k == g.wrap(j as i64 + 1) && (eta + 0.5).abs() < 1e-9 && (xi - 0.5).abs() < 1e-9);
            prop_assert!(same, "({j}, {xi}) -> ({k}, {eta})");
        }

        #[test]
        fn locate_is_periodic(x in -50.0f64..50.0) {
            let g = Grid::new(8, 0.75, 0.3).unwrap();
            let (j0, xi0) = g.locate(x);
            let (j1, xi1) = g.locate(x + g.length());
            let agree = (j0 == j1 && (xi0 - xi1).abs() < 1e-9)
                || ((xi0.abs() - 0.5).abs() < 1e-9 && (xi1.abs() - 0.5).abs() < 1e-9);
            prop_assert!(agree);
        }
    }
}
