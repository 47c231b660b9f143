//! The centre-manifold subgrid field `v(u, x)` and its tangent vectors.
//!
//! Within element `j` the field is a quartic in `xi` whose coefficients
//! depend on `u_{j-1}, u_j, u_{j+1}` through the central operators
//! `delta^2 f_j = f_{j+1} - 2 f_j + f_{j-1}` and
//! `mu delta f_j = (f_{j+1} - f_{j-1})/2`, applied to the sequences
//! `u`, `u^2` and `u^3`. Terms are kept through first order in the coupling
//! `gamma` and second order in the advection coefficient `a`.

use serde::{Deserialize, Serialize};

use crate::error::{HolifdError, Result};
use crate::grid::{Grid, GridState};
use crate::polyfield::{PiecewiseField, Polynomial};
use crate::scalar::{Dual, Scalar};

/// Burgers advection coefficient `a` and element coupling `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(default)]
    pub a: f64,
    #[serde(default = "full_coupling")]
    pub gamma: f64,
}

fn full_coupling() -> f64 {
    1.0
}

impl ModelParams {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        let p = Self { a, gamma };
        p.validate()?;
        Ok(p)
    }

    /// Linear diffusion with fully coupled elements.
    pub fn diffusion() -> Self {
        Self { a: 0.0, gamma: 1.0 }
    }

    pub fn burgers(a: f64) -> Self {
        Self { a, gamma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() {
            return Err(HolifdError::InvalidConfig("advection coefficient must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(HolifdError::InvalidConfig(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Subgrid polynomial on one element from its left, centre and right
/// amplitudes.
pub fn subgrid_piece<S: Scalar>(left: &S, centre: &S, right: &S, a: &S, gamma: &S, h: &S) -> Polynomial<S> {
    let q = |n: i64, d: i64| S::from_ratio(n, d);
    let (l, u, r) = (left.clone(), centre.clone(), right.clone());
    let sq = |x: &S| x.clone() * x.clone();
    let cube = |x: &S| x.clone() * x.clone() * x.clone();

    let d2 = r.clone() - q(2, 1) * u.clone() + l.clone();
    let md = (r.clone() - l.clone()) * q(1, 2);
    let d2_sq = sq(&r) - q(2, 1) * sq(&u) + sq(&l);
    let md_sq = (sq(&r) - sq(&l)) * q(1, 2);
    let d2_cube = cube(&r) - q(2, 1) * cube(&u) + cube(&l);
    let md_cube = (cube(&r) - cube(&l)) * q(1, 2);

    let ah = a.clone() * h.clone();
    let ah2 = sq(&ah);
    let g = gamma.clone();
    let u2 = sq(&u);
    let u3 = cube(&u);

    let c0 = u.clone();
    let c1 = q(1, 2) * ah.clone() * u2.clone()
        + g.clone() * md.clone()
        - ah.clone() * g.clone() * q(1, 8) * (u.clone() * d2.clone() + d2_sq.clone() + q(4, 1) * u2.clone())
        + ah2.clone() * g.clone() * q(1, 16) * (u.clone() * md_sq.clone() + md_cube);
    let c2 = q(1, 4) * ah2.clone() * u3.clone()
        + g.clone() * q(1, 2) * d2.clone()
        + ah.clone()
            * g.clone()
            * q(1, 4)
            * (q(2, 1) * u.clone() * md.clone() - md_sq.clone())
        - ah2.clone()
            * g.clone()
            * q(1, 32)
            * (q(3, 1) * u2.clone() * d2.clone() + q(2, 1) * u.clone() * d2_sq - d2_cube + q(8, 1) * u3);
    let c3 = ah.clone() * g.clone() * q(1, 3) * u.clone() * d2.clone()
        + ah2.clone() * g.clone() * q(1, 6) * (q(2, 1) * u2.clone() * md - u.clone() * md_sq);
    let c4 = ah2 * g * q(5, 24) * u2 * d2;
    Polynomial::from_coeffs_unchecked(vec![c0, c1, c2, c3, c4])
}

fn neighbours<S: Clone>(u: &[S], k: usize) -> (&S, &S, &S) {
    let m = u.len();
    (&u[(k + m - 1) % m], &u[k], &u[(k + 1) % m])
}

/// `v(u, x)` over the whole periodic domain in any scalar backend.
pub fn subgrid_field_generic<S: Scalar>(u: &[S], a: &S, gamma: &S, h: &S) -> PiecewiseField<S> {
    let mut field = PiecewiseField::new(u.len(), h.clone());
    for k in 0..u.len() {
        let (l, c, r) = neighbours(u, k);
        field.set_piece(k, subgrid_piece(l, c, r, a, gamma, h));
    }
    field
}

/// Directional derivative `sum_i (dv/du_i) du_i` of the subgrid field.
pub fn subgrid_derivative_generic<S: Scalar>(u: &[S], du: &[S], a: &S, gamma: &S, h: &S) -> PiecewiseField<S> {
    let lift: Vec<Dual<S>> = u.iter().zip(du).map(|(x, d)| Dual::variable(x.clone(), d.clone())).collect();
    let (a, gamma, h) = (Dual::constant(a.clone()), Dual::constant(gamma.clone()), Dual::constant(h.clone()));
    let mut field = PiecewiseField::new(u.len(), h.value.clone());
    for k in 0..u.len() {
        let (l, c, r) = neighbours(&lift, k);
        let piece = subgrid_piece(l, c, r, &a, &gamma, &h);
        field.set_piece(k, piece.map(|d| d.deriv.clone()));
    }
    field
}

/// Tangent vector `e_j = dv/du_j`, supported on elements `j-1, j, j+1`.
pub fn tangent_vector_generic<S: Scalar>(u: &[S], j: usize, a: &S, gamma: &S, h: &S) -> PiecewiseField<S> {
    let m = u.len();
    let (a, gamma, hd) = (Dual::constant(a.clone()), Dual::constant(gamma.clone()), Dual::constant(h.clone()));
    let mut field = PiecewiseField::new(m, h.clone());
    for k in [(j + m - 1) % m, j, (j + 1) % m] {
        let seed = |i: usize| {
            let d = if i == j { S::one() } else { S::zero() };
            Dual::variable(u[i].clone(), d)
        };
        let (l, c, r) = (seed((k + m - 1) % m), seed(k), seed((k + 1) % m));
        let piece = subgrid_piece(&l, &c, &r, &a, &gamma, &hd);
        field.set_piece(k, piece.map(|d| d.deriv.clone()));
    }
    field
}

pub fn subgrid_field(u: &GridState, p: &ModelParams, grid: &Grid) -> Result<PiecewiseField<f64>> {
    check_state(u, grid)?;
    Ok(subgrid_field_generic(u.values(), &p.a, &p.gamma, &grid.h()))
}

pub fn tangent_vector(u: &GridState, j: usize, p: &ModelParams, grid: &Grid) -> Result<PiecewiseField<f64>> {
    check_state(u, grid)?;
    Ok(tangent_vector_generic(u.values(), j % grid.m(), &p.a, &p.gamma, &grid.h()))
}

/// Samples `v(u, x)` at `samples_per_element` points per element,
/// `xi = -1/2 + i / samples`, returning `(x, v)` ordered in `x`.
pub fn reconstruct(u: &GridState, p: &ModelParams, grid: &Grid, samples_per_element: usize) -> Result<Vec<(f64, f64)>> {
    if samples_per_element == 0 {
        return Err(HolifdError::InvalidConfig("need at least one sample per element".into()));
    }
    let v = subgrid_field(u, p, grid)?;
    Ok(v.sample_f64(samples_per_element)
        .into_iter()
        .map(|(j, xi, value)| (grid.position(j, xi), value))
        .collect())
}

pub(crate) fn check_state(u: &GridState, grid: &Grid) -> Result<()> {
    if u.len() != grid.m() {
        return Err(HolifdError::GridMismatch(format!("state of length {} on {}-element grid", u.len(), grid.m())));
    }
    Ok(())
}
