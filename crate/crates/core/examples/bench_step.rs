use std::time::Instant;
use nslab_core::solver::*;
use nslab_core::spectral::Grid;

fn main() {
    let grid = Grid::new(64, 128, 16.0 * std::f64::consts::PI).unwrap();
    let mut cfg = SolverConfig::new(grid.clone(), 0.5).unwrap();
    cfg.dt = 1e-3;
    let profile = build_profile(&grid, &ProfileSpec::default());
    let v0 = scale_to_eta(&profile, cfg.a, cfg.a / (4.0 * cfg.lambda)).unwrap();
    let (state, report) = make_initial_data(&v0, cfg.a, cfg.eps, cfg.n_radius).unwrap();
    let mut solver = RnsSolver::new(cfg, state, report).unwrap();
    // warmup
    for _ in 0..3 { solver.step_once().unwrap(); }
    let t0 = Instant::now();
    let n = 20;
    for _ in 0..n { solver.step_once().unwrap(); }
    let dt = t0.elapsed().as_secs_f64() / n as f64;
    println!("per step: {:.1} ms -> 1e4 steps = {:.1} min", dt * 1e3, dt * 1e4 / 60.0);
}
