//! Subgrid field `v(u, x)` of point releases at three offsets, sampled
//! across the element and its neighbours.

use holifd::projector::point_release_ic;
use holifd::subgrid::reconstruct;
use holifd::{Grid, ModelParams};

fn main() -> holifd::Result<()> {
    let grid = Grid::new(16, 1.0, 0.0)?;
    let p = ModelParams::diffusion();
    let k = 8;
    let curves: Vec<Vec<(f64, f64)>> = [0.0, 0.25, 0.5]
        .iter()
        .map(|&eta| reconstruct(&point_release_ic(k, eta, 1.0, &grid)?, &p, &grid, 8))
        .collect::<holifd::Result<_>>()?;
    println!("x,eta_0,eta_0.25,eta_0.5");
    for i in 0..curves[0].len() {
        let x = curves[0][i].0;
        if (x - grid.centre(k)).abs() <= 2.5 {
            println!("{x:.4},{:.6},{:.6},{:.6}", curves[0][i].1, curves[1][i].1, curves[2][i].1);
        }
    }
    Ok(())
}
