use std::f64::consts::PI;

use holifd::diagnostics::moments;
use holifd::model::{advance, holistic_rhs};
use holifd::projector::project;
use holifd::reference::{reference_solve, FineConfig};
use holifd::subgrid::subgrid_field;
use holifd::{Grid, GridState, InitialField, IntegrationConfig, ModelParams};

/// Exact periodic Burgers solution from `phi = 1 + eps cos(kx) exp(-k^2 t)`,
/// `u = -(2/a) phi_x / phi`.
fn cole_hopf(a: f64, eps: f64, k: f64, x: f64, t: f64) -> f64 {
    let damp = eps * (-k * k * t).exp();
    (2.0 / a) * damp * k * (k * x).sin() / (1.0 + damp * (k * x).cos())
}

#[test]
fn lattice_mode_decays_at_the_discrete_rate() {
    let (m, length) = (24, 12.0);
    let grid = Grid::with_length(m, length).unwrap();
    let k = 2.0 * PI * 3.0 / length;
    let u0: Vec<f64> = (0..m).map(|j| (k * grid.centre(j)).sin()).collect();
    let t = 0.7;
    let end = advance(&GridState::new(u0.clone()).unwrap(), &ModelParams::diffusion(), &grid, &IntegrationConfig::new(0.01, t)).unwrap();
    let h = grid.h();
    let rate = (2.0 - 2.0 * (k * h).cos()) / (h * h);
    for j in 0..m {
        assert!((end.values()[j] - u0[j] * (-rate * t).exp()).abs() < 1e-9, "j = {j}");
    }
}

#[test]
fn model_mass_rate_comes_only_from_the_non_flux_term() {
    let m = 10;
    let grid = Grid::new(m, 0.4, 0.0).unwrap();
    let u: Vec<f64> = (0..m).map(|j| 0.3 + (j as f64 * 0.9).sin()).collect();
    // sum_j u_j^2 delta^2 u_j, the only piece not in flux form
    let leak: f64 = (0..m).map(|j| u[j] * u[j] * (u[(j + 1) % m] - 2.0 * u[j] + u[(j + m - 1) % m])).sum();
    let state = GridState::new(u).unwrap();
    for a in [0.0, 0.8, -1.7] {
        let du = holistic_rhs(&state, &ModelParams::burgers(a), &grid).unwrap();
        let rate: f64 = du.values().iter().sum();
        assert!((rate + a * a / 16.0 * leak).abs() < 1e-12, "a = {a}: {rate}");
    }
}

#[test]
fn fine_solver_tracks_an_exact_burgers_solution() {
    let (a, eps, length, t) = (1.5, 0.4, 2.0 * PI, 0.5);
    let k = 2.0 * PI / length;
    let grid = Grid::with_length(16, length).unwrap();
    let u0 = InitialField::function(move |x| cole_hopf(a, eps, k, x, 0.0));
    let fine = reference_solve(&u0, &grid, &FineConfig::new(a, t).with_points(512)).unwrap();
    let last = fine.times().len() - 1;
    let worst = (0..fine.points())
        .map(|i| (fine.last()[i] - cole_hopf(a, eps, k, fine.x(i), t)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
    assert!((fine.value_at(last, 1.0) - cole_hopf(a, eps, k, 1.0, t)).abs() < 1e-4);
}

#[test]
fn holistic_forecast_converges_to_the_exact_solution() {
    let (a, eps, length, t) = (1.5, 0.4, 2.0 * PI, 0.5);
    let k = 2.0 * PI / length;
    let p = ModelParams::burgers(a);
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&m| {
            let grid = Grid::with_length(m, length).unwrap();
            let u0 = InitialField::function(move |x| cole_hopf(a, eps, k, x, 0.0));
            let start = project(&u0, &p, &grid).unwrap().state;
            let h = grid.h();
            let end = advance(&start, &p, &grid, &IntegrationConfig::new(h * h / 8.0, t)).unwrap();
            let v = subgrid_field(&end, &p, &grid).unwrap();
            let mut worst = 0.0_f64;
            for (j, xi, value) in v.sample_f64(8) {
                worst = worst.max((value - cole_hopf(a, eps, k, grid.position(j, xi), t)).abs());
            }
            worst
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 1e-2, "{errors:?}");
}

#[test]
fn projected_release_has_the_released_centroid() {
    let grid = Grid::new(32, 1.0, 0.0).unwrap();
    let p = ModelParams::diffusion();
    for eta in [-0.4, 0.0, 0.3] {
        let u = project(&InitialField::point(16, eta, 1.0), &p, &grid).unwrap().state;
        let m = moments(&u, &p, &grid, 16, 2).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-14);
        assert!((m[1] - eta).abs() < 1e-14);
        assert!((m[2] - (eta * eta - 1.0 / 6.0)).abs() < 1e-13);
    }
}
