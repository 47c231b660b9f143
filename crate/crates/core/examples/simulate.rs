//! Integrates the holistic model for a sine wave with advection and
//! compares it with the fine-grid oracle at the final time.

use holifd::model::integrate;
use holifd::projector::project;
use holifd::reference::{reference_solve, restrict_snapshot, FineConfig, RestrictMode};
use holifd::{Grid, InitialField, IntegrationConfig, ModelParams, Profile};

fn main() -> holifd::Result<()> {
    let grid = Grid::with_length(32, 2.0 * std::f64::consts::PI)?;
    let p = ModelParams::burgers(0.5);
    let u0 = InitialField::profile(Profile::Sine { amplitude: 1.0, modes: 1, phase: 0.0, background: 0.0 });
    let t_final = 1.0;

    let start = project(&u0, &p, &grid)?.state;
    let step = IntegrationConfig { record_every: 0, ..IntegrationConfig::new(grid.h().powi(2) / 8.0, t_final) };
    let model = integrate(&start, &p, &grid, &step, |_, _| {})?.final_state()?;

    let fine = reference_solve(&u0, &grid, &FineConfig::new(p.a, t_final))?;
    let oracle = restrict_snapshot(&fine, fine.snapshots().len() - 1, &grid, RestrictMode::ElementAverage)?;
    println!("max |model - oracle| over element averages at t = {t_final}: {:.3e}", model.max_abs_diff(&oracle));
    for j in (0..grid.m()).step_by(4) {
        println!("x = {:.4}  model {:+.6}  oracle {:+.6}", grid.centre(j), model[j], oracle[j]);
    }
    Ok(())
}
