//! Projection of initial fields onto the discretisation.
//!
//! The amplitudes `u_j(0)` are fixed by requiring the initial field minus
//! its centre-manifold reconstruction to be orthogonal to every projection
//! vector `z_j`. Each `z_j` is supported on elements `j-1, j, j+1` and, once
//! advection enters, depends on the state it is assembled at.

use crate::error::{HolifdError, Result};
use crate::grid::{Grid, GridState};
use crate::initial::InitialField;
use crate::polyfield::{PiecewiseField, Polynomial};
use crate::scalar::Scalar;
use crate::subgrid::{check_state, subgrid_field_generic, ModelParams};

pub const PROJECT_TOLERANCE: f64 = 1e-12;
const DIVERGENCE_BOUND: f64 = 1e60;
pub const PROJECT_MAX_ITERATIONS: usize = 50;

/// The three pieces of `z_j`: on element `j-1`, `j`, `j+1` (each in its own
/// local coordinate).
pub fn projector_pieces<S: Scalar>(
    left: &S,
    centre: &S,
    right: &S,
    a: &S,
    gamma: &S,
    h: &S,
) -> [Polynomial<S>; 3] {
    let q = |n: i64, d: i64| S::from_ratio(n, d);
    let poly = |c: Vec<S>| Polynomial::from_coeffs_unchecked(c);
    let (l, u, r) = (left.clone(), centre.clone(), right.clone());
    let g = gamma.clone();
    let ah = a.clone() * h.clone();
    let ah2 = ah.clone() * ah.clone();
    let adv = ah.clone() * g.clone() * q(1, 48);
    let adv2 = ah2.clone() * g.clone() * q(1, 384);
    let (u2, l2, r2) = (u.clone() * u.clone(), l.clone() * l.clone(), r.clone() * r.clone());

    // element j
    let head = S::one() - ah2 * u2.clone() * q(1, 16);
    let diffusive = poly(vec![g.clone() * q(1, 6), S::zero(), -g.clone()]);
    let advective = poly(vec![
        r.clone() - l.clone(),
        -(q(12, 1) * u.clone()),
        S::zero(),
        q(16, 1) * u.clone(),
    ])
    .scale(&adv);
    let second = poly(vec![
        q(8, 1) * u2.clone() + q(4, 1) * u.clone() * (r.clone() + l.clone()) + q(2, 1) * (r2.clone() + l2.clone()),
        S::zero(),
        q(24, 1) * u2.clone(),
    ])
    .scale(&adv2);
    let centre_piece = Polynomial::constant(head).add(&diffusive).add(&advective).add(&second);

    // element j-1
    let diffusive = poly(vec![-(g.clone() * q(1, 12)), g.clone() * q(1, 2), g.clone() * q(1, 2)]);
    let advective = poly(vec![
        u.clone() - q(3, 1) * l.clone(),
        q(6, 1) * l.clone(),
        S::zero(),
        -(q(8, 1) * l.clone()),
    ])
    .scale(&adv);
    let second = poly(vec![
        q(3, 1) * u2.clone() + q(4, 1) * u.clone() * l.clone() - q(5, 1) * l2.clone(),
        S::zero(),
        -(q(12, 1) * l2.clone()),
        -(q(16, 1) * l2),
    ])
    .scale(&adv2);
    let left_piece = diffusive.add(&advective).add(&second);

    // element j+1
    let diffusive = poly(vec![-(g.clone() * q(1, 12)), -(g.clone() * q(1, 2)), g * q(1, 2)]);
    let advective = poly(vec![
        q(3, 1) * r.clone() - u.clone(),
        q(6, 1) * r.clone(),
        S::zero(),
        -(q(8, 1) * r.clone()),
    ])
    .scale(&adv);
    let second = poly(vec![
        q(3, 1) * u2 + q(4, 1) * u * r.clone() - q(5, 1) * r2.clone(),
        S::zero(),
        -(q(12, 1) * r2.clone()),
        q(16, 1) * r2,
    ])
    .scale(&adv2);
    let right_piece = diffusive.add(&advective).add(&second);

    [left_piece, centre_piece, right_piece]
}

/// All `m` projection vectors at state `u` in any scalar backend.
pub fn projection_vectors_generic<S: Scalar>(u: &[S], a: &S, gamma: &S, h: &S) -> Vec<PiecewiseField<S>> {
    let m = u.len();
    (0..m)
        .map(|j| {
            let (jm, jp) = ((j + m - 1) % m, (j + 1) % m);
            let [pl, pc, pr] = projector_pieces(&u[jm], &u[j], &u[jp], a, gamma, h);
            let mut z = PiecewiseField::new(m, h.clone());
            z.add_to_piece(jm, &pl);
            z.add_to_piece(j, &pc);
            z.add_to_piece(jp, &pr);
            z
        })
        .collect()
}

/// The projection vectors assembled at one state.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    vectors: Vec<PiecewiseField<f64>>,
    state: GridState,
    params: ModelParams,
    grid: Grid,
}

impl ProjectorSet {
    pub fn vector(&self, j: usize) -> &PiecewiseField<f64> {
        &self.vectors[j % self.vectors.len()]
    }

    pub fn vectors(&self) -> &[PiecewiseField<f64>] {
        &self.vectors
    }

    pub fn state(&self) -> &GridState {
        &self.state
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `sum_j z_j(x)` at local coordinate `xi` of element `k`.
    pub fn partition_sum(&self, k: usize, xi: f64) -> f64 {
        let m = self.grid.m();
        [(k + m - 1) % m, k, (k + 1) % m]
            .iter()
            .map(|&j| self.vectors[j].piece(k).map_or(0.0, |p| p.eval(&xi)))
            .sum()
    }

    /// `<z_j, u0>` for every `j`.
    pub fn apply(&self, u0: &InitialField) -> Result<Vec<f64>> {
        self.vectors.iter().map(|z| u0.inner(z, &self.grid)).collect()
    }
}

pub fn projection_vectors(u: &GridState, p: &ModelParams, grid: &Grid) -> Result<ProjectorSet> {
    check_state(u, grid)?;
    p.validate()?;
    Ok(ProjectorSet {
        vectors: projection_vectors_generic(u.values(), &p.a, &p.gamma, &grid.h()),
        state: u.clone(),
        params: *p,
        grid: *grid,
    })
}

/// `u_j(0) = (1/h) int over element j of u_0`.
pub fn element_average(u0: &InitialField, grid: &Grid) -> Result<GridState> {
    u0.validate(grid)?;
    let u = (0..grid.m())
        .map(|j| u0.inner(&PiecewiseField::characteristic(grid.m(), grid.h(), j), grid))
        .collect::<Result<Vec<_>>>()?;
    GridState::new(u)
}

/// Naive initialisation `u_j(0) = u_0(x_j)`; point masses are mollified first.
pub fn grid_sample(u0: &InitialField, grid: &Grid) -> Result<GridState> {
    u0.validate(grid)?;
    let field = u0.mollified(grid);
    let u = (0..grid.m()).map(|j| field.value_at(grid.centre(j), grid).unwrap_or(0.0)).collect();
    GridState::new(u)
}

/// `u_j(0) = <z_j, u_0>` with the state-independent linear projectors.
pub fn project_linear(u0: &InitialField, p: &ModelParams, grid: &Grid) -> Result<GridState> {
    if p.a != 0.0 {
        return Err(HolifdError::InvalidConfig(format!(
            "linear projection needs a = 0, got a = {}",
            p.a
        )));
    }
    u0.validate(grid)?;
    let z = projection_vectors(&GridState::zeros(grid.m()), p, grid)?;
    GridState::new(z.apply(u0)?)
}

/// Closed-form amplitudes `h u_j(0)` for a mass `w` released at `eta` in
/// element `k` under linear diffusion with full coupling; returns `u_j(0)`.
pub fn point_release_ic(k: usize, eta: f64, w: f64, grid: &Grid) -> Result<GridState> {
    if !(-0.5..=0.5).contains(&eta) {
        return Err(HolifdError::CoordinateOutOfRange(eta));
    }
    let m = grid.m();
    let mut hu = vec![0.0; m];
    let e2 = eta * eta;
    hu[k % m] += w * (7.0 / 6.0 - e2);
    hu[(k + m - 1) % m] += w * (-1.0 / 12.0 - 0.5 * eta + 0.5 * e2);
    hu[(k + 1) % m] += w * (-1.0 / 12.0 + 0.5 * eta + 0.5 * e2);
    GridState::new(hu.into_iter().map(|v| v / grid.h()).collect())
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub state: GridState,
    pub iterations: usize,
    /// Max-norm of the final update.
    pub residual: f64,
}

/// Solves the orthogonality conditions `<z_j(u), u_0 - v(u)> = 0` by
/// fixed-point iteration from the element averages.
///
/// The linear part of `<z_j, v(u)>` is taken as exactly `u_j`, the
/// normalisation the projectors satisfy through the retained order; only
/// the advective remainder is iterated. With `a = 0` this reproduces
/// [`project_linear`] after one update.
pub fn project(u0: &InitialField, p: &ModelParams, grid: &Grid) -> Result<Projection> {
    project_with(u0, p, grid, PROJECT_TOLERANCE, PROJECT_MAX_ITERATIONS)
}

pub fn project_with(
    u0: &InitialField,
    p: &ModelParams,
    grid: &Grid,
    tolerance: f64,
    max_iterations: usize,
) -> Result<Projection> {
    p.validate()?;
    u0.validate(grid)?;
    let h = grid.h();
    let linear = ModelParams { a: 0.0, gamma: p.gamma };
    let z_linear = projection_vectors(&GridState::zeros(grid.m()), &linear, grid)?;
    let mut u = element_average(u0, grid)?.into_values();
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iterations {
        let z = projection_vectors_generic(&u, &p.a, &p.gamma, &h);
        let v = subgrid_field_generic(&u, &p.a, &p.gamma, &h);
        let v_linear = subgrid_field_generic(&u, &0.0, &p.gamma, &h);
        let mut next = Vec::with_capacity(u.len());
        for (j, zj) in z.iter().enumerate() {
            let linear_part = z_linear.vector(j).inner(&v_linear)?;
            next.push(linear_part + u0.inner(zj, grid)? - zj.inner(&v)?);
        }
        residual = next.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        u = next;
        if !(residual < DIVERGENCE_BOUND) {
            break;
        }
        if residual <= tolerance {
            return Ok(Projection { state: GridState::new(u)?, iterations: iteration, residual });
        }
    }
    Err(HolifdError::NoConvergence { iterations: max_iterations, residual, last: u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{PointMass, Profile};
    use crate::scalar::rat;
    use crate::subgrid::tangent_vector_generic;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn exact(c: &[(i64, i64)]) -> Vec<BigRational> {
        c.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    fn grid(m: usize, h: f64) -> Grid {
        Grid::new(m, h, 0.0).unwrap()
    }

    #[test]
    fn linear_projector_at_full_coupling() {
        let u = vec![rat(0, 1); 8];
        let z = projection_vectors_generic(&u, &rat(0, 1), &rat(1, 1), &rat(1, 1));
        assert_eq!(z[3].piece_or_zero(3).coeffs(), exact(&[(7, 6), (0, 1), (-1, 1)]).as_slice());
        assert_eq!(z[3].piece_or_zero(2).coeffs(), exact(&[(-1, 12), (1, 2), (1, 2)]).as_slice());
        assert_eq!(z[3].piece_or_zero(4).coeffs(), exact(&[(-1, 12), (-1, 2), (1, 2)]).as_slice());
        let z0 = projection_vectors_generic(&u, &rat(0, 1), &rat(0, 1), &rat(1, 1));
        assert_eq!(z0[3], PiecewiseField::characteristic(8, rat(1, 1), 3));
    }

    /// The first-order advective correction at full coupling in the
    /// rearranged form `(ha/48)[((-12 xi + 16 xi^3) u_j + u_{j+1} - u_{j-1}) chi_j
    /// + (u_j + (-3 + 6 xi - 8 xi^3) u_{j-1}) chi_{j-1}
    /// + (-u_j + (3 + 6 xi - 8 xi^3) u_{j+1}) chi_{j+1}]`.
    fn advective_correction_rearranged(l: f64, u: f64, r: f64, ha: f64, xi: f64) -> [f64; 3] {
        let s = ha / 48.0;
        [
            s * (u + (-3.0 + 6.0 * xi - 8.0 * xi.powi(3)) * l),
            s * ((-12.0 * xi + 16.0 * xi.powi(3)) * u + r - l),
            s * (-u + (3.0 + 6.0 * xi - 8.0 * xi.powi(3)) * r),
        ]
    }

    proptest! {
        #[test]
        fn two_advective_forms_agree(l in -2.0f64..2.0, u in -2.0f64..2.0, r in -2.0f64..2.0,
                                             a in -1.0f64..1.0, h in 0.1f64..2.0, xi in -0.5f64..0.5) {
            // first-order-in-a part: difference quotient of the exact
            // rational projector, which is a quadratic polynomial in a
            let at = |a: f64| projector_pieces(&l, &u, &r, &a, &1.0, &h);
            let (p, n) = (at(a), at(-a));
            let want = advective_correction_rearranged(l, u, r, h * a, xi);
            for i in 0..3 {
                let odd = 0.5 * (p[i].eval(&xi) - n[i].eval(&xi));
                prop_assert!((odd - want[i]).abs() < 1e-12, "piece {i}: {odd} vs {}", want[i]);
            }
        }

        #[test]
        fn partition_of_unity_linear(gamma in 0.0f64..1.0, k in 0usize..8, xi in -0.5f64..0.5) {
            let z = projection_vectors(&GridState::zeros(8), &ModelParams { a: 0.0, gamma }, &grid(8, 0.7)).unwrap();
            prop_assert!((z.partition_sum(k, xi) - 1.0).abs() < 1e-14);
        }

        #[test]
        fn partition_of_unity_constant_state(big_u in -3.0f64..3.0, a in -1.0f64..1.0, k in 0usize..8, xi in -0.5f64..0.5) {
            let p = ModelParams { a, gamma: 1.0 };
            let z = projection_vectors(&GridState::constant(8, big_u), &p, &grid(8, 0.4)).unwrap();
            prop_assert!((z.partition_sum(k, xi) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn linear_projection_conserves_mass(centre in 0.0f64..8.0, sigma in 0.2f64..1.0, k in 0usize..16,
                                            eta in -0.5f64..0.5, c0 in -1.0f64..1.0, c1 in -1.0f64..1.0) {
            let g = grid(16, 0.5);
            let p = ModelParams::diffusion();
            let fields = [
                InitialField::profile(Profile::Gaussian { centre, sigma, mass: 1.3, background: 0.2 }),
                InitialField::Points(vec![PointMass { k, eta, w: 0.7 }, PointMass { k: (k + 5) % 16, eta: -eta, w: 1.1 }]),
                InitialField::Piecewise({
                    let mut f = PiecewiseField::new(16, 0.5);
                    f.set_piece(k, Polynomial::new(vec![c0, c1, 0.5]).unwrap());
                    f.set_piece((k + 3) % 16, Polynomial::new(vec![c1, 0.0, 0.0, 2.0]).unwrap());
                    f
                }),
            ];
            for u0 in &fields {
                let u = project_linear(u0, &p, &g).unwrap();
                let mass: f64 = u.values().iter().sum::<f64>() * g.h();
                prop_assert!((mass - u0.mass(&g).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_field_section_form() {
        // (U h a / 48)[(6 xi - 8 xi^3)(chi_{j+1} - 2 chi_j + chi_{j-1}) + 2(chi_{j+1} - chi_{j-1})]
        let (big_u, a, h) = (rat(3, 2), rat(2, 5), rat(1, 3));
        let with = projector_pieces(&big_u, &big_u, &big_u, &a, &rat(1, 1), &h);
        let s = big_u.clone() * h.clone() * a.clone() / rat(48, 1);
        let odd = exact(&[(0, 1), (6, 1), (0, 1), (-8, 1)]);
        let shape = |c0: i64, scale: i64| {
            let mut c: Vec<BigRational> = odd.iter().map(|x| x.clone() * rat(scale, 1)).collect();
            c[0] = rat(c0, 1);
            Polynomial::new(c).unwrap().scale(&s)
        };
        let expected = [shape(-2, 1), shape(0, -2), shape(2, 1)];
        // the O(a^2) pieces are removed by evaluating at a and -a
        let minus = projector_pieces(&big_u, &big_u, &big_u, &-a.clone(), &rat(1, 1), &h);
        for i in 0..3 {
            let odd_part = with[i].sub(&minus[i]).scale(&rat(1, 2));
            assert_eq!(odd_part, expected[i], "piece {i}");
        }
    }

    #[test]
    fn normalisation_error_is_second_order_in_gamma() {
        let u = vec![rat(0, 1); 8];
        let defect = |gamma: BigRational| {
            let z = projection_vectors_generic(&u, &rat(0, 1), &gamma, &rat(1, 1));
            let mut worst = rat(0, 1);
            for i in 0..8 {
                let e = tangent_vector_generic(&u, i, &rat(0, 1), &gamma, &rat(1, 1));
                for (j, zj) in z.iter().enumerate() {
                    let delta = if i == j { rat(1, 1) } else { rat(0, 1) };
                    let d = zj.inner(&e).unwrap() - delta;
                    let d = if d < rat(0, 1) { -d } else { d };
                    if d > worst {
                        worst = d;
                    }
                }
            }
            worst
        };
        let e1 = defect(rat(1, 5));
        let e2 = defect(rat(1, 10));
        let e3 = defect(rat(1, 20));
        assert_eq!(e1.clone() / e2.clone(), rat(4, 1));
        assert_eq!(e2 / e3, rat(4, 1));
        // the diagonal defect is 19/480 gamma^2
        assert_eq!(e1, rat(19, 480) * rat(1, 25));
    }

    #[test]
    fn element_average_examples() {
        let g = grid(8, 0.5);
        let u = element_average(&InitialField::profile(Profile::Constant { value: 2.0 }), &g).unwrap();
        assert!(u.values().iter().all(|v| (v - 2.0).abs() < 1e-14));
        let u = element_average(&InitialField::point(3, 0.4, 1.0), &g).unwrap();
        assert_eq!(u[3], 2.0);
        assert_eq!(u.values().iter().filter(|v| **v != 0.0).count(), 1);
        let u = element_average(&InitialField::function(|x| x), &g).unwrap();
        assert!(u[0].abs() < 1e-15);
    }

    #[test]
    fn linear_projection_examples() {
        let g = grid(8, 1.0);
        let p = ModelParams::diffusion();
        let u = project_linear(&InitialField::profile(Profile::Constant { value: 1.0 }), &p, &g).unwrap();
        assert!(u.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let u = project_linear(&InitialField::point(4, 0.0, 1.0), &p, &g).unwrap();
        assert!((u[4] - 7.0 / 6.0).abs() < 1e-15 && (u[3] + 1.0 / 12.0).abs() < 1e-15 && (u[5] + 1.0 / 12.0).abs() < 1e-15);
        let u = project_linear(&InitialField::point(4, 0.5, 1.0), &p, &g).unwrap();
        assert!((u[4] - 11.0 / 12.0).abs() < 1e-15);
        assert!((u[5] - 7.0 / 24.0).abs() < 1e-15);
        assert!((u[3] + 5.0 / 24.0).abs() < 1e-15);
        assert!(project_linear(&InitialField::point(4, 0.5, 1.0), &ModelParams::burgers(0.1), &g).is_err());
    }

    #[test]
    fn point_release_closed_form() {
        let g = grid(8, 0.5);
        let u = point_release_ic(2, 0.25, 1.0, &g).unwrap();
        let hu: Vec<f64> = u.values().iter().map(|v| v * g.h()).collect();
        assert!((hu[2] - 53.0 / 48.0).abs() < 1e-15);
        assert!((hu[3] - 7.0 / 96.0).abs() < 1e-15);
        assert!((hu[1] + 17.0 / 96.0).abs() < 1e-15);
        assert!((hu.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for eta in [-0.5, -0.3, 0.0, 0.125, 0.5] {
            let a = point_release_ic(6, eta, 0.8, &g).unwrap();
            let b = project_linear(&InitialField::point(6, eta, 0.8), &ModelParams::diffusion(), &g).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
        assert!(point_release_ic(2, 0.6, 1.0, &g).is_err());
    }

    #[test]
    fn nonlinear_projection_reduces_to_linear() {
        let g = grid(16, 0.5);
        let u0 = InitialField::profile(Profile::Gaussian { centre: 3.3, sigma: 0.3, mass: 1.0, background: 0.1 });
        let p = ModelParams::diffusion();
        let pr = project(&u0, &p, &g).unwrap();
        let lin = project_linear(&u0, &p, &g).unwrap();
        assert!(pr.state.max_abs_diff(&lin) < 1e-15);
        assert!(pr.iterations <= 2);
    }

    #[test]
    fn constant_field_nonlinear_fixed_point() {
        // v(c) is exactly c and every z_j(c) has unit mean, so c = U
        let (m, h, big_u, a) = (12, 0.5, 1.2, 0.8);
        let g = grid(m, h);
        let u0 = InitialField::profile(Profile::Constant { value: big_u });
        let pr = project(&u0, &ModelParams::burgers(a), &g).unwrap();
        let c = pr.state[0];
        assert!(pr.state.values().iter().all(|v| (v - c).abs() < 1e-12));
        assert!((c - big_u).abs() < 1e-12);
        let v = crate::subgrid::subgrid_field(&pr.state, &ModelParams::burgers(a), &g).unwrap();
        assert!((v.integrate() - u0.mass(&g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn projection_reports_non_convergence() {
        let g = grid(8, 1.0);
        let u0 = InitialField::profile(Profile::Gaussian { centre: 4.0, sigma: 0.3, mass: 40.0, background: 0.0 });
        match project(&u0, &ModelParams::burgers(3.0), &g) {
            Err(HolifdError::NoConvergence { last, .. }) => assert_eq!(last.len(), 8),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
