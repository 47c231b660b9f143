//! Projection of a symmetric bump with advection: the fixed-point
//! iteration, and how the neighbours shift as `a` grows.

use holifd::projector::{project, project_linear};
use holifd::{Grid, InitialField, ModelParams, Profile};

fn main() -> holifd::Result<()> {
    let grid = Grid::new(16, 1.0, 0.0)?;
    let k = 8;
    let bump = InitialField::profile(Profile::Gaussian { centre: grid.centre(k), sigma: 0.4, mass: 1.0, background: 0.0 });
    let base = project_linear(&bump, &ModelParams::diffusion(), &grid)?;
    println!("a = 0     u(k-1) = {:.8}  u(k) = {:.8}  u(k+1) = {:.8}", base[k - 1], base[k], base[k + 1]);
    for a in [0.02, 0.05, 0.1, 0.5] {
        let pr = project(&bump, &ModelParams::burgers(a), &grid)?;
        let u = &pr.state;
        println!(
            "a = {a:<5} u(k-1) {:+.3e}  u(k) {:+.3e}  u(k+1) {:+.3e}  ({} iterations)",
            u[k - 1] - base[k - 1],
            u[k] - base[k],
            u[k + 1] - base[k + 1],
            pr.iterations
        );
    }
    Ok(())
}
