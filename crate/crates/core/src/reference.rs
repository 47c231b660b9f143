//! Conventional fine-grid solver for `u_t + a u u_x = u_xx`: second-order
//! central differences, conservative advection flux, RK4, periodic domain.
//!
//! Fine point `i` sits at `origin + i dx`, so with `r = points / m` even the
//! element centres and edges are fine points.

use serde::{Deserialize, Serialize};

use crate::error::{HolifdError, Result};
use crate::grid::{Grid, GridState};
use crate::initial::InitialField;
use crate::model::Rk4;

pub const DEFAULT_REFINEMENT: usize = 64;

/// `dt <= DIFFUSIVE_LIMIT dx^2`; the RK4 stability interval on the negative
/// real axis reaches about `2.78`, against a spectral radius `4 / dx^2`.
pub const DIFFUSIVE_LIMIT: f64 = 0.6;

/// `dt |a| max|u| / dx <= ADVECTIVE_LIMIT`.
pub const ADVECTIVE_LIMIT: f64 = 2.0;

const DEFAULT_DT_FACTOR: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineConfig {
    pub a: f64,
    pub t_final: f64,
    /// Fine points over the domain, a multiple of the element count;
    /// `64 m` when absent.
    #[serde(default)]
    pub points: Option<usize>,
    /// `dx^2 / 2` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Times in `(0, t_final)` to record besides the endpoints.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl FineConfig {
    pub fn new(a: f64, t_final: f64) -> Self {
        Self { a, t_final, points: None, dt: None, snapshot_times: Vec::new() }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = Some(points);
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn points_for(&self, grid: &Grid) -> usize {
        self.points.unwrap_or(DEFAULT_REFINEMENT * grid.m())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FineSolution {
    grid: Grid,
    points: usize,
    times: Vec<f64>,
    snapshots: Vec<Vec<f64>>,
}

impl FineSolution {
    pub fn from_snapshots(grid: Grid, times: Vec<f64>, snapshots: Vec<Vec<f64>>) -> Result<Self> {
        let points = snapshots.first().map_or(0, Vec::len);
        if points == 0 || !points.is_multiple_of(grid.m()) || times.len() != snapshots.len() {
            return Err(HolifdError::GridMismatch("snapshots must share a multiple of m points".into()));
        }
        if snapshots.iter().any(|s| s.len() != points) {
            return Err(HolifdError::GridMismatch("snapshots differ in length".into()));
        }
        if snapshots.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HolifdError::NonFinite("fine snapshot".into()));
        }
        Ok(Self { grid, points, times, snapshots })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.grid.length() / self.points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.origin() + i as f64 * self.dx()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Vec<f64>] {
        &self.snapshots
    }

    pub fn last(&self) -> &[f64] {
        self.snapshots.last().expect("at least the initial snapshot")
    }

    /// `dx sum_i u_i`.
    pub fn mass(&self, snapshot: usize) -> f64 {
        self.dx() * self.snapshots[snapshot].iter().sum::<f64>()
    }

    /// `dx sum_i (x_i - x_c) u_i` with each offset taken as its minimal periodic image.
    pub fn first_moment(&self, snapshot: usize, x_c: f64) -> f64 {
        let length = self.grid.length();
        let dx = self.dx();
        self.snapshots[snapshot]
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let d = (self.x(i) - x_c).rem_euclid(length);
                let d = if d >= 0.5 * length { d - length } else { d };
                d * u
            })
            .sum::<f64>()
            * dx
    }

    /// Periodic linear interpolation of a snapshot.
    pub fn value_at(&self, snapshot: usize, x: f64) -> f64 {
        let s = &self.snapshots[snapshot];
        let r = ((x - self.grid.origin()) / self.dx()).rem_euclid(self.points as f64);
        let i = r.floor() as usize % self.points;
        let w = r - r.floor();
        (1.0 - w) * s[i] + w * s[(i + 1) % self.points]
    }

    /// `t, u_0, ..., u_{N-1}` per row.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        for (t, s) in self.times.iter().zip(&self.snapshots) {
            write!(w, "{t:.12e}")?;
            for v in s {
                write!(w, ",{v:.15e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictMode {
    /// Values at the element centres.
    Sample,
    /// Composite Simpson averages over each element.
    ElementAverage,
}

fn fine_rhs(u: &[f64], a: f64, dx: f64, out: &mut [f64]) {
    let n = u.len();
    let inv_dx2 = 1.0 / (dx * dx);
    let adv = a / (4.0 * dx);
    for i in 0..n {
        let l = u[if i == 0 { n - 1 } else { i - 1 }];
        let r = u[if i + 1 == n { 0 } else { i + 1 }];
        let c = u[i];
        out[i] = (r - 2.0 * c + l) * inv_dx2 - adv * (r * r - l * l);
    }
}

/// Solves on `N = cfg.points` fine points covering the same periodic domain
/// as `grid`. Point masses are replaced by their `h/8` Gaussians.
pub fn reference_solve(u0: &InitialField, grid: &Grid, cfg: &FineConfig) -> Result<FineSolution> {
    u0.validate(grid)?;
    let points = cfg.points_for(grid);
    if points == 0 || !points.is_multiple_of(grid.m()) {
        return Err(HolifdError::InvalidConfig(format!(
            "fine points {points} must be a positive multiple of m = {}",
            grid.m()
        )));
    }
    if !(cfg.t_final.is_finite() && cfg.t_final >= 0.0) || !cfg.a.is_finite() {
        return Err(HolifdError::InvalidConfig("final time and a must be finite, t_final >= 0".into()));
    }
    let dx = grid.length() / points as f64;
    let source = u0.mollified(grid);
    let mut u: Vec<f64> = (0..points)
        .map(|i| source.value_at(grid.origin() + i as f64 * dx, grid).unwrap_or(0.0))
        .collect();
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(HolifdError::NonFinite(format!("initial fine value at point {i}")));
    }

    let dt = cfg.dt.unwrap_or(DEFAULT_DT_FACTOR * dx * dx);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(HolifdError::InvalidConfig(format!("time step must be positive, got {dt}")));
    }
    let diffusive = DIFFUSIVE_LIMIT * dx * dx;
    if dt > diffusive {
        return Err(HolifdError::Unstable { dt, cap: diffusive });
    }
    let umax = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if cfg.a != 0.0 && umax > 0.0 {
        let advective = ADVECTIVE_LIMIT * dx / (cfg.a.abs() * umax);
        if dt > advective {
            return Err(HolifdError::Unstable { dt, cap: advective });
        }
    }

    let mut marks: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|t| *t > 0.0 && *t < cfg.t_final).collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    if cfg.t_final > 0.0 {
        marks.push(cfg.t_final);
    }

    let mut rk = Rk4::new(points);
    let mut times = vec![0.0];
    let mut snapshots = vec![u.clone()];
    let mut t = 0.0;
    for mark in marks {
        let span = mark - t;
        let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
        let step = span / n as f64;
        for k in 1..=n {
            rk.step(&mut u, step, |x, out| fine_rhs(x, cfg.a, dx, out));
            if let Some(i) = u.iter().position(|v| !v.is_finite()) {
                return Err(HolifdError::BlowUp { time: t + k as f64 * step, detail: format!("fine point {i}") });
            }
        }
        t = mark;
        times.push(t);
        snapshots.push(u.clone());
    }
    Ok(FineSolution { grid: *grid, points, times, snapshots })
}

/// Coarse states of one snapshot.
pub fn restrict_snapshot(f: &FineSolution, snapshot: usize, grid: &Grid, mode: RestrictMode) -> Result<GridState> {
    if grid != &f.grid {
        return Err(HolifdError::GridMismatch("fine solution was computed for another grid".into()));
    }
    let r = f.points / grid.m();
    if !r.is_multiple_of(2) {
        return Err(HolifdError::GridMismatch(format!(
            "restriction needs an even number of fine intervals per element, got {r}"
        )));
    }
    let s = &f.snapshots[snapshot];
    let n = f.points;
    let values = (0..grid.m())
        .map(|j| match mode {
            RestrictMode::Sample => s[j * r],
            RestrictMode::ElementAverage => {
                let start = j * r + n - r / 2;
                let sum: f64 = (0..=r)
                    .map(|k| {
                        let w = if k == 0 || k == r {
                            1.0
                        } else if k % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        w * s[(start + k) % n]
                    })
                    .sum();
                sum / (3.0 * r as f64)
            }
        })
        .collect();
    GridState::new(values)
}

pub fn restrict(f: &FineSolution, grid: &Grid, mode: RestrictMode) -> Result<Vec<GridState>> {
    (0..f.snapshots.len()).map(|s| restrict_snapshot(f, s, grid, mode)).collect()
}
