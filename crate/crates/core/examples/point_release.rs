//! Projects unit point releases onto the model and prints the distributed
//! initial values together with their moments.

use holifd::diagnostics::moments;
use holifd::projector::{point_release_ic, project_linear};
use holifd::{Grid, InitialField, ModelParams};

fn main() -> holifd::Result<()> {
    let grid = Grid::new(32, 1.0, 0.0)?;
    let p = ModelParams::diffusion();
    let k = 16;
    for eta in [0.0, 0.25, 0.5] {
        let u = project_linear(&InitialField::point(k, eta, 1.0), &p, &grid)?;
        let closed = point_release_ic(k, eta, 1.0, &grid)?;
        let m = moments(&u, &p, &grid, k, 2)?;
        println!(
            "eta = {eta:<4}  h u = ({:.6}, {:.6}, {:.6})  closed-form gap {:.1e}",
            u[k - 1],
            u[k],
            u[k + 1],
            u.max_abs_diff(&closed)
        );
        println!("           m0 = {:.12}  m1 = {:.12}  m2 = {:.12}  (eta^2 - 1/6 = {:.12})", m[0], m[1], m[2], eta * eta - 1.0 / 6.0);
    }
    Ok(())
}
