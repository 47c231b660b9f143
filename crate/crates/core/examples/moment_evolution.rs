//! Evolves a point release with the diffusive model and fits the spreading
//! rate of the second moment.

use holifd::diagnostics::{moment_evolution, FitWindow};
use holifd::projector::point_release_ic;
use holifd::{Grid, IntegrationConfig, ModelParams};

fn main() -> holifd::Result<()> {
    let grid = Grid::new(64, 1.0, 0.0)?;
    let p = ModelParams::diffusion();
    let k = 32;
    let cfg = IntegrationConfig::new(0.125, 2.0);
    for eta in [0.0, 0.25, 0.5] {
        let u0 = point_release_ic(k, eta, 1.0, &grid)?;
        let r = moment_evolution(&u0, &p, &grid, &cfg, k, FitWindow::default())?;
        let drift = r.m1.iter().map(|v| (v - r.m1[0]).abs()).fold(0.0, f64::max);
        println!("eta = {eta:<4} m2(0) = {:+.12}  dm2/dt = {:.9}  m1 drift {drift:.1e}", r.m2[0], r.slope);
    }
    Ok(())
}
