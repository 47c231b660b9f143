//! Forecast error of three initial-condition strategies against the
//! fine-grid oracle for a narrow Gaussian centred on an element edge.

use holifd::diagnostics::{compare_ic_strategies, CompareConfig};
use holifd::{Grid, InitialField, ModelParams, Profile};

fn main() -> holifd::Result<()> {
    let cfg = CompareConfig {
        length: 16.0,
        resolutions: vec![16, 32],
        t_final: 1.0,
        dt_factor: 0.125,
        fine_refinement: 64,
        moment_centre: 8.0,
    };
    let edge_gaussian = |g: &Grid| {
        let centre = g.centre(g.m() / 2) + 0.5 * g.h();
        Ok(InitialField::profile(Profile::Gaussian { centre, sigma: g.h() / 8.0, mass: 1.0, background: 0.0 }))
    };
    let report = compare_ic_strategies(edge_gaussian, &ModelParams::diffusion(), &cfg)?;
    report.write_csv(std::io::stdout())?;
    report.write_orders_csv(std::io::stdout())?;
    Ok(())
}
