//! Moments of the reconstructed field, moment evolution, the PDE residual
//! of the subgrid field, and comparisons of initialisation strategies
//! against the fine-grid oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HolifdError, Result};
use crate::grid::{Grid, GridState};
use crate::initial::InitialField;
use crate::model::{holistic_rhs, integrate, IntegrationConfig};
use crate::polyfield::{PiecewiseField, Polynomial};
use crate::projector::{element_average, grid_sample, project};
use crate::reference::{reference_solve, FineConfig, FineSolution};
use crate::subgrid::{subgrid_derivative_generic, subgrid_field, ModelParams};

/// Relative size of the field at the antipode above which moments are
/// reported as ill-defined.
pub const ANTIPODE_WARNING: f64 = 1e-8;

const MAX_MOMENT: usize = 4;

/// Offset of `x` from `x_c` reduced into `[-L/2, L/2)`.
fn minimal_image(x: f64, x_c: f64, length: f64) -> f64 {
    let d = (x - x_c).rem_euclid(length);
    if d >= 0.5 * length {
        d - length
    } else {
        d
    }
}

/// `int (x - x_c)^p v dx` for `p = 0..=pmax`, integrating each piece
/// exactly with every point placed at its minimal image about `x_c`; the
/// element holding the antipode is split there.
pub fn field_moments(v: &PiecewiseField<f64>, grid: &Grid, x_c: f64, pmax: usize) -> Result<Vec<f64>> {
    if pmax > MAX_MOMENT {
        return Err(HolifdError::InvalidConfig(format!("moments are available up to order {MAX_MOMENT}")));
    }
    let (h, length) = (grid.h(), grid.length());
    let mut out = vec![0.0; pmax + 1];
    let mut peak = 0.0_f64;
    for (j, piece) in v.pieces() {
        let d = minimal_image(grid.centre(j), x_c, length);
        // (x - x_c) = d + h xi up to the cut at d + h xi = +-L/2
        let cut = ((0.5 * length - d) / h, (-0.5 * length - d) / h);
        let spans = if cut.0 < 0.5 {
            vec![(-0.5, cut.0, d), (cut.0, 0.5, d - length)]
        } else if cut.1 > -0.5 {
            vec![(-0.5, cut.1, d + length), (cut.1, 0.5, d)]
        } else {
            vec![(-0.5, 0.5, d)]
        };
        for (lo, hi, shift) in spans {
            let offset = Polynomial::new(vec![shift, h])?;
            let mut weight = Polynomial::constant(1.0);
            for m in out.iter_mut() {
                let anti = weight.mul(piece)?.antiderivative();
                *m += h * (anti.eval(&hi) - anti.eval(&lo));
                weight = weight.mul(&offset)?;
            }
        }
        for xi in [-0.5, 0.0, 0.5] {
            peak = peak.max(piece.eval(&xi).abs());
        }
    }
    let (ja, xia) = grid.locate(x_c + 0.5 * grid.length());
    let antipode = v.piece(ja).map(|p| p.eval(&xia).abs()).unwrap_or(0.0);
    if peak > 0.0 && antipode > ANTIPODE_WARNING * peak {
        log::warn!(
            "field at the antipode of x = {x_c} is {:.3e} of its peak; moments on the circle are ill-defined",
            antipode / peak
        );
    }
    Ok(out)
}

/// Moments `m_0..m_pmax` of the reconstructed `v(u, x)` about the centre of element `k`.
pub fn moments(u: &GridState, p: &ModelParams, grid: &Grid, k: usize, pmax: usize) -> Result<Vec<f64>> {
    moments_about(u, p, grid, grid.centre(k % grid.m()), pmax)
}

pub fn moments_about(u: &GridState, p: &ModelParams, grid: &Grid, x_c: f64, pmax: usize) -> Result<Vec<f64>> {
    let v = subgrid_field(u, p, grid)?;
    field_moments(&v, grid, x_c, pmax)
}

/// `dx sum_i (x_i - x_c)^p u_i` of a fine snapshot.
pub fn fine_moments(f: &FineSolution, snapshot: usize, x_c: f64, pmax: usize) -> Vec<f64> {
    let length = f.grid().length();
    let dx = f.dx();
    let mut out = vec![0.0; pmax + 1];
    for (i, u) in f.snapshots()[snapshot].iter().enumerate() {
        let d = minimal_image(f.x(i), x_c, length);
        let mut w = dx * u;
        for m in out.iter_mut() {
            *m += w;
            w *= d;
        }
    }
    out
}

/// Time window of the `dm2/dt` fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { start: 0.2, end: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub k: usize,
    pub times: Vec<f64>,
    pub m0: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    /// Least-squares slope of `m2` over the window.
    pub slope: f64,
    pub window: FitWindow,
}

impl MomentReport {
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "# dm2/dt fitted over [{}, {}]: {:.12e}", self.window.start, self.window.end, self.slope)?;
        writeln!(w, "t,m0,m1,m2")?;
        for i in 0..self.times.len() {
            writeln!(w, "{:.12e},{:.15e},{:.15e},{:.15e}", self.times[i], self.m0[i], self.m1[i], self.m2[i])?;
        }
        Ok(())
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x[..n].iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Integrates the model from `u0` and records the moments about element `k`
/// at every recorded step.
pub fn moment_evolution(
    u0: &GridState,
    p: &ModelParams,
    grid: &Grid,
    cfg: &IntegrationConfig,
    k: usize,
    window: FitWindow,
) -> Result<MomentReport> {
    let traj = integrate(u0, p, grid, cfg, |_, _| {})?;
    let mut report =
        MomentReport { k, times: Vec::new(), m0: Vec::new(), m1: Vec::new(), m2: Vec::new(), slope: f64::NAN, window };
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let m = moments(&GridState::new(s.clone())?, p, grid, k, 2)?;
        report.times.push(*t);
        report.m0.push(m[0]);
        report.m1.push(m[1]);
        report.m2.push(m[2]);
    }
    let eps = 1e-12;
    let (xs, ys): (Vec<f64>, Vec<f64>) = report
        .times
        .iter()
        .zip(&report.m2)
        .filter(|(t, _)| **t >= window.start - eps && **t <= window.end + eps)
        .map(|(t, m)| (*t, *m))
        .unzip();
    report.slope = least_squares_slope(&xs, &ys).ok_or_else(|| {
        HolifdError::InvalidConfig(format!(
            "fewer than two recorded times inside the fit window [{}, {}]",
            window.start, window.end
        ))
    })?;
    Ok(report)
}

/// Sup-norm over element interiors of `v_t - v_xx + a v v_x`, with `v_t`
/// from the chain rule through the model's `du/dt`. Samples sit at
/// `xi = -1/2 + (i + 1/2)/samples`.
pub fn pde_residual(u: &GridState, p: &ModelParams, grid: &Grid, samples: usize) -> Result<f64> {
    if p.gamma != 1.0 {
        return Err(HolifdError::InvalidConfig(format!("the residual is defined at full coupling, got gamma = {}", p.gamma)));
    }
    if samples == 0 {
        return Err(HolifdError::InvalidConfig("need at least one sample per element".into()));
    }
    let h = grid.h();
    let du = holistic_rhs(u, p, grid)?;
    let v = subgrid_field(u, p, grid)?;
    let vt = subgrid_derivative_generic(u.values(), du.values(), &p.a, &p.gamma, &h);
    let vx = v.diff();
    let vxx = vx.diff();
    let mut sup = 0.0_f64;
    for j in 0..grid.m() {
        let mut r = vt.piece_or_zero(j).sub(&vxx.piece_or_zero(j));
        if p.a != 0.0 {
            r = r.add(&v.piece_or_zero(j).mul(&vx.piece_or_zero(j))?.scale(&p.a));
        }
        for i in 0..samples {
            let xi = -0.5 + (i as f64 + 0.5) / samples as f64;
            sup = sup.max(r.eval(&xi).abs());
        }
    }
    Ok(sup)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `u_j(0) = u_0(x_j)`.
    GridSample,
    /// `u_j(0)` the element average of `u_0`.
    ElementAverage,
    /// `u_j(0)` from the projection of `u_0` onto the model.
    Holistic,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::GridSample, Strategy::ElementAverage, Strategy::Holistic];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::GridSample => "grid_sample",
            Strategy::ElementAverage => "element_average",
            Strategy::Holistic => "holistic",
        }
    }

    pub fn initial_state(self, u0: &InitialField, p: &ModelParams, grid: &Grid) -> Result<GridState> {
        match self {
            Strategy::GridSample => grid_sample(u0, grid),
            Strategy::ElementAverage => element_average(u0, grid),
            Strategy::Holistic => Ok(project(u0, p, grid)?.state),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub length: f64,
    pub resolutions: Vec<usize>,
    pub t_final: f64,
    /// Model step as a multiple of `h^2`.
    #[serde(default = "default_dt_factor")]
    pub dt_factor: f64,
    /// Fine points per element of the oracle.
    #[serde(default = "default_refinement")]
    pub fine_refinement: usize,
    /// Moments are taken about this coordinate.
    pub moment_centre: f64,
}

fn default_dt_factor() -> f64 {
    0.125
}

fn default_refinement() -> usize {
    crate::reference::DEFAULT_REFINEMENT
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub strategy: Strategy,
    pub m: usize,
    pub h: f64,
    /// `L2` distance between `v(u(T), x)` and the oracle at `T`.
    pub l2_error: f64,
    /// `|m_p - m_p^oracle|` at `T` for `p = 0, 1, 2`.
    pub moment_errors: [f64; 3],
    /// The same at `t = 0`.
    pub initial_moment_errors: [f64; 3],
}

impl CompareRow {
    pub fn moment_error(&self) -> f64 {
        self.moment_errors.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedOrder {
    pub strategy: Strategy,
    pub l2: f64,
    pub moment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub orders: Vec<ObservedOrder>,
}

impl CompareReport {
    pub fn row(&self, strategy: Strategy, m: usize) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.m == m)
    }

    pub fn order(&self, strategy: Strategy) -> Option<&ObservedOrder> {
        self.orders.iter().find(|o| o.strategy == strategy)
    }

    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "strategy,m,h,error,m0_error,m1_error,m2_error,m0_error_t0,m1_error_t0,m2_error_t0")?;
        for r in &self.rows {
            write!(w, "{},{},{:.12e},{:.12e}", r.strategy.name(), r.m, r.h, r.l2_error)?;
            for e in r.moment_errors.iter().chain(&r.initial_moment_errors) {
                write!(w, ",{e:.12e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_orders_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "strategy,l2_order,moment_order")?;
        for o in &self.orders {
            writeln!(w, "{},{:.6},{:.6}", o.strategy.name(), o.l2, o.moment)?;
        }
        Ok(())
    }
}

/// Slope of `log(error)` against `log(h)`.
pub fn observed_order(h: &[f64], error: &[f64]) -> f64 {
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = error.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    least_squares_slope(&lx, &ly).unwrap_or(f64::NAN)
}

fn l2_distance(v: &PiecewiseField<f64>, grid: &Grid, f: &FineSolution) -> f64 {
    let s = f.last();
    let sum: f64 = (0..f.points())
        .map(|i| {
            let (j, xi) = grid.locate(f.x(i));
            let model = v.piece(j).map(|p| p.eval(&xi)).unwrap_or(0.0);
            (model - s[i]).powi(2)
        })
        .sum();
    (sum * f.dx()).sqrt()
}

fn moment_errors(model: &[f64], oracle: &[f64]) -> [f64; 3] {
    [0, 1, 2].map(|p| (model[p] - oracle[p]).abs())
}

/// Runs every strategy at every resolution against the oracle. `initial`
/// builds the initial field for each grid, so its shape may scale with `h`.
/// Resolutions run in parallel; the report is ordered by resolution, then
/// strategy.
pub fn compare_ic_strategies<F>(initial: F, p: &ModelParams, cfg: &CompareConfig) -> Result<CompareReport>
where
    F: Fn(&Grid) -> Result<InitialField> + Sync,
{
    p.validate()?;
    if cfg.resolutions.is_empty() {
        return Err(HolifdError::InvalidConfig("comparison needs at least one resolution".into()));
    }
    if !(cfg.dt_factor > 0.0 && cfg.dt_factor <= 0.25) {
        return Err(HolifdError::InvalidConfig(format!("dt_factor must lie in (0, 1/4], got {}", cfg.dt_factor)));
    }
    let per_m: Vec<Vec<CompareRow>> = cfg
        .resolutions
        .par_iter()
        .map(|&m| {
            let grid = Grid::with_length(m, cfg.length)?;
            let u0 = initial(&grid)?;
            let fine_cfg = FineConfig::new(p.a, cfg.t_final).with_points(cfg.fine_refinement * m);
            let oracle = reference_solve(&u0, &grid, &fine_cfg)?;
            let oracle_t0 = fine_moments(&oracle, 0, cfg.moment_centre, 2);
            let oracle_t = fine_moments(&oracle, oracle.snapshots().len() - 1, cfg.moment_centre, 2);
            let step = IntegrationConfig { record_every: 0, ..IntegrationConfig::new(cfg.dt_factor * grid.h().powi(2), cfg.t_final) };
            Strategy::ALL
                .iter()
                .map(|&strategy| {
                    let start = strategy.initial_state(&u0, p, &grid)?;
                    let end = integrate(&start, p, &grid, &step, |_, _| {})?.final_state()?;
                    let v = subgrid_field(&end, p, &grid)?;
                    let m_t0 = moments_about(&start, p, &grid, cfg.moment_centre, 2)?;
                    let m_t = field_moments(&v, &grid, cfg.moment_centre, 2)?;
                    Ok(CompareRow {
                        strategy,
                        m,
                        h: grid.h(),
                        l2_error: l2_distance(&v, &grid, &oracle),
                        moment_errors: moment_errors(&m_t, &oracle_t),
                        initial_moment_errors: moment_errors(&m_t0, &oracle_t0),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<CompareRow> = per_m.into_iter().flatten().collect();
    let orders = Strategy::ALL
        .iter()
        .map(|&strategy| {
            let mine: Vec<&CompareRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
            let h: Vec<f64> = mine.iter().map(|r| r.h).collect();
            let l2: Vec<f64> = mine.iter().map(|r| r.l2_error).collect();
            let mom: Vec<f64> = mine.iter().map(|r| r.moment_error()).collect();
            ObservedOrder { strategy, l2: observed_order(&h, &l2), moment: observed_order(&h, &mom) }
        })
        .collect();
    Ok(CompareReport { rows, orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{PointMass, Profile};
    use crate::projector::{point_release_ic, project_linear};
    use proptest::prelude::{prop_assert, prop_oneof, proptest};
    use proptest::strategy::Strategy as PropStrategy;

    fn grid(m: usize, h: f64) -> Grid {
        Grid::new(m, h, 0.0).unwrap()
    }

    #[test]
    fn point_release_moments() {
        let g = grid(32, 1.0);
        let p = ModelParams::diffusion();
        for eta in [0.0, 0.25, 0.5, -0.3] {
            let u = point_release_ic(16, eta, 1.0, &g).unwrap();
            let m = moments(&u, &p, &g, 16, 2).unwrap();
            assert!((m[0] - 1.0).abs() < 1e-14);
            assert!((m[1] - eta).abs() < 1e-14);
            assert!((m[2] - (eta * eta - 1.0 / 6.0)).abs() < 1e-13, "eta {eta}: {}", m[2]);
        }
        let h = 0.5;
        let g = grid(32, h);
        let u = point_release_ic(10, 0.25, 1.0, &g).unwrap();
        let m = moments(&u, &p, &g, 10, 2).unwrap();
        assert!((m[1] - h / 4.0).abs() < 1e-14);
        assert!((m[2] - h * h * (1.0 / 16.0 - 1.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn zero_state_has_zero_moments() {
        let g = grid(16, 1.0);
        let m = moments(&GridState::zeros(16), &ModelParams::burgers(0.4), &g, 3, 4).unwrap();
        assert!(m.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn moments_use_minimal_images() {
        let g = grid(16, 1.0);
        let p = ModelParams::diffusion();
        let u = point_release_ic(0, 0.0, 1.0, &g).unwrap();
        let a = moments(&u, &p, &g, 0, 2).unwrap();
        let shifted = point_release_ic(5, 0.0, 1.0, &g).unwrap();
        let b = moments(&shifted, &p, &g, 5, 2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn second_moment_grows_at_rate_two() {
        let g = grid(64, 1.0);
        let p = ModelParams::diffusion();
        let u0 = point_release_ic(32, 0.25, 1.0, &g).unwrap();
        let cfg = IntegrationConfig::new(0.125, 2.0);
        let r = moment_evolution(&u0, &p, &g, &cfg, 32, FitWindow::default()).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-3, "{}", r.slope);
        assert!(r.m0.iter().all(|m| (m - 1.0).abs() < 1e-10));
        assert!(r.m1.iter().all(|m| (m - 0.25).abs() < 1e-9));
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().lines().nth(1) == Some("t,m0,m1,m2"));
    }

    #[test]
    fn symmetric_release_keeps_first_moment_on_a_short_circle() {
        let g = grid(32, 1.0);
        let p = ModelParams::diffusion();
        let u0 = point_release_ic(16, 0.0, 1.0, &g).unwrap();
        let r = moment_evolution(&u0, &p, &g, &IntegrationConfig::new(0.125, 2.0), 16, FitWindow::default()).unwrap();
        assert!(r.m1.iter().all(|m| m.abs() < 1e-12));
    }

    #[test]
    fn fit_window_must_hold_two_times() {
        let g = grid(16, 1.0);
        let u0 = point_release_ic(8, 0.0, 1.0, &g).unwrap();
        let cfg = IntegrationConfig::new(0.125, 0.1);
        assert!(moment_evolution(&u0, &ModelParams::diffusion(), &g, &cfg, 8, FitWindow::default()).is_err());
    }

    #[test]
    fn residual_of_constant_states() {
        let g = grid(16, 0.5);
        let c = GridState::constant(16, 1.3);
        assert_eq!(pde_residual(&c, &ModelParams::diffusion(), &g, 8).unwrap(), 0.0);
        // a uniform state is an exact steady solution and v reproduces it
        for a in [0.7, -1.5] {
            let got = pde_residual(&c, &ModelParams::burgers(a), &g, 8).unwrap();
            assert!(got < 1e-12, "a = {a}: {got}");
        }
    }

    #[test]
    fn residual_vanishes_for_quadratic_data() {
        let g = grid(16, 0.5);
        // the periodic wrap breaks the quadratic only next to the seam
        let q = GridState::new((0..16).map(|j| 0.2 + 0.1 * j as f64 - 0.03 * (j * j) as f64).collect()).unwrap();
        let p = ModelParams::diffusion();
        let v = crate::subgrid::subgrid_field(&q, &p, &g).unwrap();
        let du = holistic_rhs(&q, &p, &g).unwrap();
        let vt = subgrid_derivative_generic(q.values(), du.values(), &0.0, &1.0, &0.5);
        let vxx = v.diff().diff();
        for j in 2..14 {
            let r = vt.piece_or_zero(j).sub(&vxx.piece_or_zero(j));
            assert!(r.coeffs().iter().all(|c| c.abs() < 1e-12), "element {j}: {r:?}");
        }
        assert!(pde_residual(&q, &ModelParams::new(0.0, 0.5).unwrap(), &g, 4).is_err());
    }

    #[test]
    fn slope_and_order_fits() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((least_squares_slope(&x, &y).unwrap() - 2.0).abs() < 1e-14);
        let h = [0.5, 0.25, 0.125];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((observed_order(&h, &e) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_data_strategies_converge_together() {
        let p = ModelParams::diffusion();
        let cfg = CompareConfig {
            length: 16.0,
            resolutions: vec![16, 32],
            t_final: 0.5,
            dt_factor: 0.125,
            fine_refinement: 16,
            moment_centre: 8.0,
        };
        let u0 = |_: &Grid| {
            Ok(InitialField::profile(Profile::Sine { amplitude: 0.5, modes: 1, phase: 0.3, background: 1.0 }))
        };
        let r = compare_ic_strategies(u0, &p, &cfg).unwrap();
        for s in Strategy::ALL {
            let ratio = r.row(s, 16).unwrap().l2_error / r.row(s, 32).unwrap().l2_error;
            assert!(ratio > 3.5, "{s:?}: {ratio}");
        }
    }

    #[test]
    fn narrow_gaussian_defeats_naive_sampling() {
        let p = ModelParams::diffusion();
        let cfg = CompareConfig {
            length: 16.0,
            resolutions: vec![16],
            t_final: 1.0,
            dt_factor: 0.125,
            fine_refinement: 64,
            moment_centre: 8.0,
        };
        let u0 = |g: &Grid| {
            Ok(InitialField::profile(Profile::Gaussian {
                centre: g.centre(8) - 0.5 * g.h(),
                sigma: g.h() / 8.0,
                mass: 1.0,
                background: 0.0,
            }))
        };
        let r = compare_ic_strategies(u0, &p, &cfg).unwrap();
        let naive = r.row(Strategy::GridSample, 16).unwrap();
        let holistic = r.row(Strategy::Holistic, 16).unwrap();
        assert!(naive.l2_error > 10.0 * holistic.l2_error);
        assert!(holistic.initial_moment_errors[0] < 1e-9 && holistic.initial_moment_errors[1] < 1e-9);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }

    #[test]
    fn naive_sampling_misses_the_second_moment_of_a_release() {
        let g = grid(32, 1.0);
        let p = ModelParams::diffusion();
        let u0 = InitialField::point(16, 0.0, 1.0);
        let naive = grid_sample(&u0, &g).unwrap();
        let m = moments(&naive, &p, &g, 16, 2).unwrap();
        assert!(m[2].abs() < 1e-12);
        let holistic = project_linear(&u0, &p, &g).unwrap();
        let m = moments(&holistic, &p, &g, 16, 2).unwrap();
        assert!((m[2] + 1.0 / 6.0).abs() < 1e-13);
    }

    fn any_initial(m: usize, h: f64) -> impl PropStrategy<Value = InitialField> {
        let length = m as f64 * h;
        prop_oneof![
            (0.4 * length..0.6 * length, 0.5..1.2, 0.2..2.0).prop_map(|(c, s, w)| InitialField::profile(
                Profile::Gaussian { centre: c, sigma: s, mass: w, background: 0.0 }
            )),
            (m / 2 - 2..m / 2 + 2, -0.5..0.5, 0.1..2.0)
                .prop_map(|(k, eta, w)| InitialField::Points(vec![PointMass { k, eta, w }])),
            proptest::collection::vec(-1.0..1.0, 3).prop_map(move |c| {
                let mut f = PiecewiseField::new(m, h);
                for (i, j) in (m / 2 - 1..=m / 2 + 1).enumerate() {
                    f.set_piece(j, Polynomial::new(vec![c[i], 0.5 * c[(i + 1) % 3], 0.3]).unwrap());
                }
                InitialField::Piecewise(f)
            }),
        ]
    }

    proptest! {
        #[test]
        fn linear_projection_keeps_mass_and_centroid(u0 in any_initial(32, 0.75), gamma in 0.0..=1.0f64) {
            // the mass holds for every coupling, the centroid at full coupling
            let g = grid(32, 0.75);
            let p = ModelParams::new(0.0, gamma).unwrap();
            let u = project_linear(&u0, &p, &g).unwrap();
            let x_c = g.centre(16);
            let m0 = moments_about(&u, &p, &g, x_c, 0).unwrap()[0];
            let full = ModelParams::diffusion();
            let m = moments_about(&project_linear(&u0, &full, &g).unwrap(), &full, &g, x_c, 1).unwrap();
            let one = PiecewiseField::uniform(32, 0.75, Polynomial::constant(1.0));
            let mut x = PiecewiseField::new(32, 0.75);
            for j in 0..32 {
                let d = minimal_image(g.centre(j), x_c, g.length());
                x.set_piece(j, Polynomial::new(vec![d, 0.75]).unwrap());
            }
            let mass = 0.75 * u0.inner(&one, &g).unwrap();
            let first = 0.75 * u0.inner(&x, &g).unwrap();
            prop_assert!((m0 - mass).abs() < 1e-10);
            prop_assert!((m[0] - mass).abs() < 1e-10);
            prop_assert!((m[1] - first).abs() < 1e-10);
        }
    }
}
