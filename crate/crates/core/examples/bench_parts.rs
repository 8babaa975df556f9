use std::time::Instant;
use nslab_core::besov::{vector_shell_l2_profile, SeparableWeight, ShellMap};
use nslab_core::solver::*;
use nslab_core::spectral::{transform, Grid};

fn timeit<F: FnMut()>(label: &str, n: usize, mut f: F) {
    let t0 = Instant::now();
    for _ in 0..n { f(); }
    println!("{label}: {:.2} ms", t0.elapsed().as_secs_f64() / n as f64 * 1e3);
}

fn main() {
    let grid = Grid::new(64, 128, 16.0 * std::f64::consts::PI).unwrap();
    let cfg = SolverConfig::new(grid.clone(), 0.5).unwrap();
    let profile = build_profile(&grid, &ProfileSpec::default());
    let v0 = scale_to_eta(&profile, cfg.a, cfg.a / (4.0 * cfg.lambda)).unwrap();
    let (state, _report) = make_initial_data(&v0, cfg.a, cfg.eps, cfg.n_radius).unwrap();
    let v1 = state.full_component(0);
    let v2 = state.full_component(1);
    let map = ShellMap::new(&grid);
    let weight = SeparableWeight::phase(&grid, 0.5, 0.9).unwrap();

    timeit("inverse_pair", 10, || { let _ = transform::inverse_pair(&grid, v1.coeffs(), v2.coeffs()); });
    let (p1, p2) = transform::inverse_pair(&grid, v1.coeffs(), v2.coeffs());
    timeit("forward_pair", 10, || { let _ = transform::forward_pair(&grid, &p1, &p2); });
    timeit("ProductSet::compute", 5, || { let _ = ProductSet::compute([&v1, &v2, &state.w3], Some((cfg.n_radius, cfg.eps))).unwrap(); });
    timeit("nonlinear_tendency", 5, || { let _ = nonlinear_tendency(&state, cfg.eps, cfg.n_radius).unwrap(); });
    timeit("vector_shell_profile(3 fields)", 10, || { let _ = vector_shell_l2_profile(&map, &[&v1, &v2, &state.w3], Some(&weight)); });
    timeit("divergence_residual", 10, || { let _ = state.divergence_residual(); });
    timeit("spectrum_outside", 10, || { let _ = state.spectrum_outside(cfg.n_radius, cfg.eps); });
    timeit("energy+dissipation", 10, || { let _ = state.energy(cfg.eps) + state.dissipation(cfg.eps); });
    timeit("full_component x2", 10, || { let _ = (state.full_component(0), state.full_component(1)); });
}
