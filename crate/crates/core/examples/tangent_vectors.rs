//! Compares the analytic tangent vectors `e_j = dv/du_j` with central
//! differences of the subgrid field.

use holifd::subgrid::{subgrid_field, tangent_vector};
use holifd::{Grid, GridState, ModelParams};

fn main() -> holifd::Result<()> {
    let grid = Grid::new(12, 0.5, 0.0)?;
    let u = GridState::new((0..12).map(|j| 1.0 + 0.3 * (j as f64).sin()).collect())?;
    let j = 5;
    let eps = 1e-6;
    for (a, gamma) in [(0.0, 1.0), (0.7, 0.5), (1.5, 1.0)] {
        let p = ModelParams::new(a, gamma)?;
        let e = tangent_vector(&u, j, &p, &grid)?;
        let bump = |s: f64| {
            let mut v = u.values().to_vec();
            v[j] += s;
            subgrid_field(&GridState::new(v).unwrap(), &p, &grid)
        };
        let (up, down) = (bump(eps)?, bump(-eps)?);
        let mut worst: f64 = 0.0;
        for k in 0..grid.m() {
            for i in 0..=10 {
                let xi = -0.5 + i as f64 / 10.0;
                let fd = (up.piece_or_zero(k).eval(&xi) - down.piece_or_zero(k).eval(&xi)) / (2.0 * eps);
                worst = worst.max((fd - e.piece_or_zero(k).eval(&xi)).abs());
            }
        }
        println!("a = {a}, gamma = {gamma}: max |analytic - finite difference| = {worst:.2e}");
    }
    Ok(())
}
