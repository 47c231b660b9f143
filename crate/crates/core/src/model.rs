//! The holistic finite-difference model and its fixed-step RK4 integrator.
//!
//! ```text
//! du_j/dt = delta^2 u_j / h^2 - (a / 2h) mu delta u_j^2
//!           + (a^2 / 16) (delta^2 u_j^3 - u_j^2 delta^2 u_j)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{HolifdError, Result};
use crate::grid::{Grid, GridState};
use crate::subgrid::{check_state, ModelParams};

/// Time derivative of the model amplitudes.
pub fn holistic_rhs(u: &GridState, p: &ModelParams, grid: &Grid) -> Result<GridState> {
    check_state(u, grid)?;
    let mut out = vec![0.0; u.len()];
    rhs_into(u.values(), p.a, grid.h(), &mut out);
    GridState::new(out)
}

pub(crate) fn rhs_into(u: &[f64], a: f64, h: f64, out: &mut [f64]) {
    let m = u.len();
    let inv_h2 = 1.0 / (h * h);
    for j in 0..m {
        let (l, c, r) = (u[(j + m - 1) % m], u[j], u[(j + 1) % m]);
        let d2 = r - 2.0 * c + l;
        let mut du = d2 * inv_h2;
        if a != 0.0 {
            let md_sq = 0.5 * (r * r - l * l);
            let d2_cube = r * r * r - 2.0 * c * c * c + l * l * l;
            du += -a / (2.0 * h) * md_sq + a * a / 16.0 * (d2_cube - c * c * d2);
        }
        out[j] = du;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Skip the `dt <= h^2/4` stability cap.
    #[serde(default)]
    pub allow_unstable: bool,
    /// Record every n-th step in the returned trajectory (0: endpoints only).
    #[serde(default = "every_step")]
    pub record_every: usize,
}

fn every_step() -> usize {
    1
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, allow_unstable: false, record_every: 1 }
    }

    pub fn stability_cap(grid: &Grid) -> f64 {
        0.25 * grid.h() * grid.h()
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(HolifdError::InvalidConfig(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(HolifdError::InvalidConfig(format!("final time must be non-negative, got {}", self.t_final)));
        }
        let cap = Self::stability_cap(grid);
        if !self.allow_unstable && self.dt > cap * (1.0 + 1e-12) {
            return Err(HolifdError::Unstable { dt: self.dt, cap });
        }
        Ok(())
    }

    /// Number of equal steps reaching `t_final`, and the step actually used.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> Option<(f64, &[f64])> {
        self.times.last().map(|&t| (t, self.states.last().unwrap().as_slice()))
    }

    pub fn final_state(&self) -> Result<GridState> {
        GridState::new(self.states.last().cloned().unwrap_or_default())
    }

    /// `t, u_0, ..., u_{m-1}` rows with a header line.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        let m = self.states.first().map_or(0, Vec::len);
        let header: Vec<String> = std::iter::once("t".to_string()).chain((0..m).map(|j| format!("u_{j}"))).collect();
        writeln!(w, "{}", header.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.12e}")?;
            for v in s {
                write!(w, ",{v:.15e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// One classical RK4 step of `du/dt = f(u)` with scratch buffers.
pub(crate) struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        Self { k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]], tmp: vec![0.0; n] }
    }

    pub(crate) fn step(&mut self, u: &mut [f64], dt: f64, mut f: impl FnMut(&[f64], &mut [f64])) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        f(u, k1);
        for i in 0..u.len() {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        f(tmp, k2);
        for i in 0..u.len() {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        f(tmp, k3);
        for i in 0..u.len() {
            tmp[i] = u[i] + dt * k3[i];
        }
        f(tmp, k4);
        for i in 0..u.len() {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Integrates the model from `u0` to `cfg.t_final`, calling `observer`
/// after the initial state and after every step.
pub fn integrate(
    u0: &GridState,
    p: &ModelParams,
    grid: &Grid,
    cfg: &IntegrationConfig,
    mut observer: impl FnMut(f64, &GridState),
) -> Result<Trajectory> {
    check_state(u0, grid)?;
    p.validate()?;
    cfg.validate(grid)?;
    let (n, dt) = cfg.steps();
    let mut u = u0.values().to_vec();
    let mut rk = Rk4::new(u.len());
    let mut traj = Trajectory::default();
    let record = |traj: &mut Trajectory, step: usize, t: f64, u: &[f64]| {
        let every = cfg.record_every;
        if step == 0 || step == n || (every > 0 && step.is_multiple_of(every)) {
            traj.times.push(t);
            traj.states.push(u.to_vec());
        }
    };
    record(&mut traj, 0, 0.0, &u);
    observer(0.0, u0);
    for step in 1..=n {
        rk.step(&mut u, dt, |x, out| rhs_into(x, p.a, grid.h(), out));
        let t = step as f64 * dt;
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(HolifdError::BlowUp { time: t, detail: format!("u_{i} = {}", u[i]) });
        }
        record(&mut traj, step, t, &u);
        observer(t, &GridState::new(u.clone())?);
    }
    Ok(traj)
}

/// Integrates without recording, returning the final state.
pub fn advance(u0: &GridState, p: &ModelParams, grid: &Grid, cfg: &IntegrationConfig) -> Result<GridState> {
    let cfg = IntegrationConfig { record_every: 0, ..*cfg };
    integrate(u0, p, grid, &cfg, |_, _| {})?.final_state()
}
