//! Fine-grid oracle on a decaying sine: the Fourier amplitude against the
//! exact heat-equation decay, and the two restrictions to a coarse grid.

use holifd::reference::{reference_solve, restrict_snapshot, FineConfig, RestrictMode};
use holifd::{Grid, InitialField, Profile};

fn main() -> holifd::Result<()> {
    let grid = Grid::with_length(8, 32.0)?;
    let u0 = InitialField::profile(Profile::Sine { amplitude: 1.0, modes: 1, phase: 0.0, background: 0.0 });
    let t = 1.0;
    let fine = reference_solve(&u0, &grid, &FineConfig::new(0.0, t).with_points(512))?;
    let k = 2.0 * std::f64::consts::PI / grid.length();
    let s = fine.last();
    let amp = 2.0 / s.len() as f64 * (0..s.len()).map(|i| s[i] * (k * fine.x(i)).sin()).sum::<f64>();
    println!("amplitude {amp:.10}, exact {:.10}", (-k * k * t).exp());
    let last = fine.snapshots().len() - 1;
    let sample = restrict_snapshot(&fine, last, &grid, RestrictMode::Sample)?;
    let average = restrict_snapshot(&fine, last, &grid, RestrictMode::ElementAverage)?;
    for j in 0..grid.m() {
        println!("x = {:5.1}  sample {:+.6}  average {:+.6}", grid.centre(j), sample[j], average[j]);
    }
    Ok(())
}
