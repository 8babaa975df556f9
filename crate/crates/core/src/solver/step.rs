//! Time integration: exponential integrating factor for the anisotropic heat
//! part (exact per mode), Heun treatment of the projected nonlinearity, and
//! the coupled loss ODE
//! `theta_dot = ||w^3_Phi||_{B^{7/2}} + eps ||w^h_Phi||_{B^{7/2}}`
//! stepped fields-first within each step.

use crate::besov::{
    besov_from_profile, vector_shell_l2_profile, NormSeries, PhaseState, SeparableWeight,
    ShellMap,
};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

use super::initial::InitialReport;
use super::rhs::{nonlinear_tendency, Tendencies};
use super::state::{SolverConfig, StepDiagnostics, VelocityState};

/// Why a run stopped before its horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunClass {
    /// Reached `t_max` with `lambda theta <= a` throughout.
    BootstrapHeld,
    /// The bound `theta <= a/lambda` failed at `t`.
    BootstrapBreached { t: f64 },
    NumericalBlowup { t: f64 },
    /// The fixed step exceeded the advective stability guard at `t`.
    CflExceeded { t: f64 },
}

impl RunClass {
    pub fn label(&self) -> &'static str {
        match self {
            RunClass::BootstrapHeld => "held",
            RunClass::BootstrapBreached { .. } => "breached",
            RunClass::NumericalBlowup { .. } => "blowup",
            RunClass::CflExceeded { .. } => "cfl",
        }
    }
}

/// Completed run: classification, final state and the full monitoring
/// record.
pub struct RunOutcome {
    pub class: RunClass,
    pub state: VelocityState,
    pub theta_final: f64,
    pub history: Vec<StepDiagnostics>,
    pub initial: InitialReport,
    /// Largest coefficient modulus ever observed outside `B_{n,eps}`.
    pub max_spectrum_outside: f64,
    /// Largest divergence residual over all steps.
    pub max_div_residual: f64,
    /// Set when the top dyadic shell ever carried more than the configured
    /// fraction of a monitored `B^{7/2}` norm.
    pub tail_warning: bool,
    pub ltilde_v_final: f64,
    pub ltilde_vh_final: f64,
}

pub struct RnsSolver {
    cfg: SolverConfig,
    state: VelocityState,
    theta: f64,
    map: ShellMap,
    decay_full: SeparableWeight,
    series_v: NormSeries,
    series_vh: NormSeries,
    history: Vec<StepDiagnostics>,
    step_count: u64,
    max_spectrum_outside: f64,
    max_div_residual: f64,
    tail_warning: bool,
    initial: InitialReport,
}

enum Halt {
    Breach,
    Blowup,
    Cfl,
}

impl RnsSolver {
    pub fn new(cfg: SolverConfig, state: VelocityState, initial: InitialReport) -> Result<Self> {
        cfg.validate()?;
        let map = ShellMap::new(&cfg.grid);
        let decay_full = SeparableWeight::heat_anisotropic(&cfg.grid, cfg.dt, cfg.eps)?;
        let n_shells = map.n_shells();
        Ok(RnsSolver {
            cfg,
            state,
            theta: 0.0,
            map,
            decay_full,
            series_v: NormSeries::new(3.5, n_shells),
            series_vh: NormSeries::new(3.5, n_shells),
            history: Vec::new(),
            step_count: 0,
            max_spectrum_outside: 0.0,
            max_div_residual: 0.0,
            tail_warning: false,
            initial,
        })
    }

    pub fn state(&self) -> &VelocityState {
        &self.state
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phase(&self) -> PhaseState {
        PhaseState {
            a: self.cfg.a,
            lambda: self.cfg.lambda,
            eps: self.cfg.eps,
            theta: self.theta,
            t: self.state.t,
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn history(&self) -> &[StepDiagnostics] {
        &self.history
    }

    /// `(||w^3_Phi||_{B^{7/2}}, ||w^h_Phi||_{B^{7/2}}, tail_flag)` at the
    /// given clock and loss values. Fails when the margin is exhausted or
    /// the weight overflows.
    fn weighted_w_norms(
        &self,
        state: &VelocityState,
        t: f64,
        theta: f64,
    ) -> Result<(f64, f64, bool)> {
        let margin = self.cfg.a - self.cfg.lambda * theta;
        if margin < 0.0 {
            return Err(Error::AdmissibilityViolated {
                lambda_theta: self.cfg.lambda * theta,
                a: self.cfg.a,
            });
        }
        let weight = SeparableWeight::phase(&self.cfg.grid, t, margin)?;
        let p3 = vector_shell_l2_profile(&self.map, &[&state.w3], Some(&weight));
        let ph = vector_shell_l2_profile(
            &self.map,
            &[&state.w_h[0], &state.w_h[1]],
            Some(&weight),
        );
        let tail = self.tail_exceeded(&p3) || self.tail_exceeded(&ph);
        Ok((
            besov_from_profile(&p3, 3.5),
            besov_from_profile(&ph, 3.5),
            tail,
        ))
    }

    fn tail_exceeded(&self, profile: &[f64]) -> bool {
        let total = besov_from_profile(profile, 3.5);
        if total <= 0.0 {
            return false;
        }
        match (0..profile.len()).rev().find(|&s| profile[s] > 0.0) {
            Some(top) => {
                let top_term =
                    (ShellMap::shell_at_slot(top) as f64 * 3.5).exp2() * profile[top];
                top_term > self.cfg.tail_warn_fraction * total
            }
            None => false,
        }
    }

    fn theta_rate(&mut self, state: &VelocityState, t: f64, theta: f64) -> Result<f64> {
        let (b3, bh, tail) = self.weighted_w_norms(state, t, theta)?;
        self.tail_warning |= tail;
        Ok(b3 + self.cfg.eps * bh)
    }

    fn apply_decay(&self, state: &mut VelocityState) {
        for f in state.w_h.iter_mut() {
            self.decay_full.apply_in_place(f);
        }
        self.decay_full.apply_in_place(&mut state.w3);
        let (dt, eps) = (self.cfg.dt, self.cfg.eps);
        for p in state.vbar_h.iter_mut() {
            p.scale_by_mode(|x3| (-dt * eps * eps * x3 * x3).exp());
        }
    }

    fn add_tendency(state: &mut VelocityState, k: &Tendencies, s: f64) {
        for i in 0..2 {
            state.w_h[i].add_assign_scaled(&k.w_h[i], s);
            state.vbar_h[i].add_assign_scaled(&k.vbar_h[i], s);
        }
        state.w3.add_assign_scaled(&k.w3, s);
    }

    /// One step of size `cfg.dt`. On halt the state is left at the last
    /// accepted step.
    fn try_step(&mut self) -> std::result::Result<StepDiagnostics, Halt> {
        let cfg = self.cfg.clone();
        let (t_old, theta_old) = (self.state.t, self.theta);

        // Rate at the step start (also the Heun stage-one rate).
        let rate0 = match self.weighted_w_norms(&self.state, t_old, theta_old) {
            Ok((b3, bh, tail)) => {
                self.tail_warning |= tail;
                b3 + cfg.eps * bh
            }
            Err(Error::AdmissibilityViolated { .. }) => return Err(Halt::Breach),
            Err(_) => return Err(Halt::Blowup),
        };

        let k1 = match nonlinear_tendency(&self.state, cfg.eps, cfg.n_radius) {
            Ok(k) => k,
            Err(_) => return Err(Halt::Blowup),
        };

        // CFL guard on the fixed step.
        let dx = (2.0 * std::f64::consts::PI / cfg.grid.n_h() as f64)
            .min(2.0 * cfg.grid.l_vert() / cfg.grid.n_v() as f64);
        if k1.sup_velocity > 0.0 && cfg.dt > cfg.cfl_fraction * dx / k1.sup_velocity {
            return Err(Halt::Cfl);
        }

        // Predictor: w* = E (w + dt k1), one full integrating-factor Euler.
        let mut predictor = self.state.clone();
        Self::add_tendency(&mut predictor, &k1, cfg.dt);
        self.apply_decay(&mut predictor);
        predictor.t = t_old + cfg.dt;

        let k2 = match nonlinear_tendency(&predictor, cfg.eps, cfg.n_radius) {
            Ok(k) => k,
            Err(_) => return Err(Halt::Blowup),
        };

        // Corrector: w' = E (w + dt/2 k1) + dt/2 k2.
        let mut next = self.state.clone();
        Self::add_tendency(&mut next, &k1, 0.5 * cfg.dt);
        self.apply_decay(&mut next);
        Self::add_tendency(&mut next, &k2, 0.5 * cfg.dt);
        next.t = t_old + cfg.dt;

        if !next.is_finite() {
            return Err(Halt::Blowup);
        }

        // Loss update, fields first.
        let theta_pred = theta_old + cfg.dt * rate0;
        let rate1 = match self.theta_rate(&next, next.t, theta_pred) {
            Ok(r) => r,
            Err(Error::AdmissibilityViolated { .. }) => return Err(Halt::Breach),
            Err(_) => return Err(Halt::Blowup),
        };
        let theta_next = theta_old + 0.5 * cfg.dt * (rate0 + rate1);
        if cfg.lambda * theta_next > cfg.a {
            self.state = next;
            self.theta = theta_next;
            return Err(Halt::Breach);
        }

        self.state = next;
        self.theta = theta_next;
        self.step_count += 1;

        // Monitoring at the new time.
        let (b3, bh, tail) = match self.weighted_w_norms(&self.state, self.state.t, self.theta) {
            Ok(v) => v,
            Err(_) => return Err(Halt::Blowup),
        };
        self.tail_warning |= tail;
        let theta_dot = b3 + cfg.eps * bh;
        let margin = cfg.a - cfg.lambda * self.theta;
        let weight = match SeparableWeight::phase(&cfg.grid, self.state.t, margin) {
            Ok(w) => w,
            Err(_) => return Err(Halt::Blowup),
        };
        let v1 = self.state.full_component(0);
        let v2 = self.state.full_component(1);
        let pv = vector_shell_l2_profile(
            &self.map,
            &[&v1, &v2, &self.state.w3],
            Some(&weight),
        );
        let pvh = vector_shell_l2_profile(&self.map, &[&v1, &v2], Some(&weight));
        self.series_v.accumulate_profile(&pv);
        self.series_vh.accumulate_profile(&pvh);

        let div_residual = self.state.divergence_residual();
        self.max_div_residual = self.max_div_residual.max(div_residual);
        let outside = self.state.spectrum_outside(cfg.n_radius, cfg.eps);
        self.max_spectrum_outside = self.max_spectrum_outside.max(outside);

        let diag = StepDiagnostics {
            step: self.step_count,
            t: self.state.t,
            theta: self.theta,
            theta_dot,
            margin,
            b72_w3_phi: b3,
            eps_b72_wh_phi: cfg.eps * bh,
            ltilde_v_phi: self.series_v.ltilde(),
            ltilde_vh_phi: self.series_vh.ltilde(),
            energy: self.state.energy(cfg.eps),
            dissipation: self.state.dissipation(cfg.eps),
            div_residual,
        };
        self.history.push(diag);
        Ok(diag)
    }

    /// Integrate to `t_max` (or halt) and consume the solver.
    pub fn run(mut self) -> RunOutcome {
        self.seed_accumulators();
        let class = loop {
            if self.state.t >= self.cfg.t_max - 0.5 * self.cfg.dt {
                break RunClass::BootstrapHeld;
            }
            match self.try_step() {
                Ok(_) => {}
                Err(Halt::Breach) => break RunClass::BootstrapBreached { t: self.state.t },
                Err(Halt::Blowup) => break RunClass::NumericalBlowup { t: self.state.t },
                Err(Halt::Cfl) => break RunClass::CflExceeded { t: self.state.t },
            }
        };
        RunOutcome {
            class,
            theta_final: self.theta,
            initial: self.initial,
            max_spectrum_outside: self.max_spectrum_outside,
            max_div_residual: self.max_div_residual,
            tail_warning: self.tail_warning,
            ltilde_v_final: self.series_v.ltilde(),
            ltilde_vh_final: self.series_vh.ltilde(),
            history: std::mem::take(&mut self.history),
            state: self.state,
        }
    }

    /// Ingest the `t = 0` sample so the accumulators start from
    /// `||e^{a|D_3|} v_0||`.
    fn seed_accumulators(&mut self) {
        if let Ok(weight) = SeparableWeight::phase(&self.cfg.grid, 0.0, self.cfg.a) {
            let v1 = self.state.full_component(0);
            let v2 = self.state.full_component(1);
            let pv = vector_shell_l2_profile(
                &self.map,
                &[&v1, &v2, &self.state.w3],
                Some(&weight),
            );
            let pvh = vector_shell_l2_profile(&self.map, &[&v1, &v2], Some(&weight));
            self.series_v.accumulate_profile(&pv);
            self.series_vh.accumulate_profile(&pvh);
        }
    }

    /// Advance exactly one step (test and experiment hook). Errors mirror
    /// the run-level classifications.
    pub fn step_once(&mut self) -> Result<StepDiagnostics> {
        if self.step_count == 0 {
            self.seed_accumulators();
        }
        self.try_step().map_err(|h| match h {
            Halt::Breach => Error::AdmissibilityViolated {
                lambda_theta: self.cfg.lambda * self.theta,
                a: self.cfg.a,
            },
            Halt::Blowup => Error::InvalidConfig("numerical blowup".into()),
            Halt::Cfl => Error::InvalidConfig("cfl guard tripped".into()),
        })
    }
}

/// Trapezoidal energy-balance residuals over a run history:
/// `(E_{k+1} - E_k)/dt + (D_k + D_{k+1})/2` per step, which is `O(dt^2)`
/// for the second-order scheme; `c_estimate` normalises by `dt^2`.
#[derive(Debug, Clone)]
pub struct EnergyCheck {
    pub max_residual: f64,
    pub c_estimate: f64,
}

pub fn energy_check(history: &[StepDiagnostics]) -> Option<EnergyCheck> {
    if history.len() < 2 {
        return None;
    }
    let mut max_residual: f64 = 0.0;
    let mut max_dt: f64 = 0.0;
    for w in history.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 {
            continue;
        }
        let residual =
            (w[1].energy - w[0].energy) / dt + 0.5 * (w[0].dissipation + w[1].dissipation);
        max_residual = max_residual.max(residual.abs());
        max_dt = max_dt.max(dt);
    }
    Some(EnergyCheck {
        max_residual,
        c_estimate: max_residual / (max_dt * max_dt),
    })
}

/// Convenience: state from fields, full run. Used by experiments.
pub fn run_to_outcome(
    cfg: SolverConfig,
    v0: &[SpectralField; 3],
) -> Result<RunOutcome> {
    let (state, report) = super::initial::make_initial_data(v0, cfg.a, cfg.eps, cfg.n_radius)?;
    let solver = RnsSolver::new(cfg, state, report)?;
    Ok(solver.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::initial::{
        build_profile, make_initial_data, scale_to_eta, ProfileKind, ProfileSpec,
    };
    use crate::spectral::Grid;
    use num_complex::Complex64;

    fn small_cfg(t_max: f64) -> SolverConfig {
        let grid = Grid::new(8, 16, 16.0 * std::f64::consts::PI).unwrap();
        let mut cfg = SolverConfig::new(grid, 0.5).unwrap();
        cfg.dt = 1e-2;
        cfg.t_max = t_max;
        cfg
    }

    #[test]
    fn zero_state_stays_zero() {
        let cfg = small_cfg(0.05);
        let grid = cfg.grid.clone();
        let z = [
            SpectralField::zeros(&grid),
            SpectralField::zeros(&grid),
            SpectralField::zeros(&grid),
        ];
        let outcome = run_to_outcome(cfg, &z).unwrap();
        assert_eq!(outcome.class, RunClass::BootstrapHeld);
        assert_eq!(outcome.theta_final, 0.0);
        assert_eq!(outcome.state.w3.max_coeff_modulus(), 0.0);
    }

    #[test]
    fn pure_mean_flow_decays_exactly_and_theta_stays_zero() {
        let cfg = small_cfg(0.1);
        let grid = cfg.grid.clone();
        let eps = cfg.eps;
        let dt = cfg.dt;
        // vbar-only data: w = 0.
        let profile = SpectralField::from_physical(&grid, |_, _, x3| {
            (std::f64::consts::PI / grid.l_vert() * 2.0 * x3).cos()
        });
        let v0 = [profile, SpectralField::zeros(&grid), SpectralField::zeros(&grid)];
        let (state, report) = make_initial_data(&v0, 1.0, eps, cfg.n_radius).unwrap();
        let c0 = state.vbar_h[0].coeffs()[2];
        let mut solver = RnsSolver::new(cfg, state, report).unwrap();
        let d1 = solver.step_once().unwrap();
        assert_eq!(d1.theta, 0.0);
        assert_eq!(d1.theta_dot, 0.0);
        let xi3 = grid.xi3(2);
        let expect = c0 * (-eps * eps * xi3 * xi3 * dt).exp();
        let got = solver.state().vbar_h[0].coeffs()[2];
        assert!((got - expect).norm() < 1e-14 * expect.norm());
        // w stays identically zero.
        assert_eq!(solver.state().w3.max_coeff_modulus(), 0.0);
        assert_eq!(solver.state().w_h[0].max_coeff_modulus(), 0.0);
    }

    #[test]
    fn small_data_run_holds_and_preserves_invariants() {
        let grid = Grid::new(16, 32, 16.0 * std::f64::consts::PI).unwrap();
        let mut cfg = SolverConfig::new(grid.clone(), 0.5).unwrap();
        cfg.dt = 2e-3;
        cfg.t_max = 0.2;
        let profile = build_profile(&grid, &ProfileSpec::default());
        let v0 = scale_to_eta(&profile, cfg.a, cfg.a / (4.0 * cfg.lambda)).unwrap();
        let outcome = run_to_outcome(cfg.clone(), &v0).unwrap();
        assert_eq!(outcome.class, RunClass::BootstrapHeld);
        assert!(outcome.max_div_residual <= 1e-10, "{}", outcome.max_div_residual);
        assert_eq!(outcome.max_spectrum_outside, 0.0);
        // theta nondecreasing.
        let mut prev = 0.0;
        for d in &outcome.history {
            assert!(d.theta >= prev - 1e-18);
            prev = d.theta;
        }
        assert!(outcome.theta_final <= cfg.a / cfg.lambda);
        // Energy residual behaves like dt^2.
        let e = energy_check(&outcome.history).unwrap();
        assert!(e.max_residual.is_finite());
    }

    #[test]
    fn breach_is_reported_for_oversized_data() {
        let grid = Grid::new(8, 16, 16.0 * std::f64::consts::PI).unwrap();
        let mut cfg = SolverConfig::new(grid.clone(), 0.5).unwrap();
        cfg.dt = 5e-3;
        cfg.t_max = 5.0;
        cfg.lambda = 512.0; // tiny allowed loss: a/lambda ~ 2e-3
        let profile = build_profile(&grid, &ProfileSpec::default());
        let v0 = scale_to_eta(&profile, cfg.a, 0.5).unwrap(); // far too large
        let outcome = run_to_outcome(cfg, &v0).unwrap();
        assert!(
            matches!(outcome.class, RunClass::BootstrapBreached { .. })
                || matches!(outcome.class, RunClass::CflExceeded { .. }),
            "class {:?}",
            outcome.class
        );
    }

    #[test]
    fn linear_only_energy_identity_is_exact_per_mode() {
        // Mean-flow-only run: energy decays exactly; the trapezoid residual
        // is the pure time-quadrature error, O(dt^2).
        let cfg = small_cfg(0.2);
        let grid = cfg.grid.clone();
        let profile = SpectralField::from_physical(&grid, |_, _, x3| {
            (std::f64::consts::PI / grid.l_vert() * 3.0 * x3).cos()
        });
        let v0 = [profile, SpectralField::zeros(&grid), SpectralField::zeros(&grid)];
        let outcome = run_to_outcome(cfg.clone(), &v0).unwrap();
        let e = energy_check(&outcome.history).unwrap();
        // Exact decay rate 2 eps^2 xi^2; trapezoid error ~ (rate*dt)^2/12.
        let xi3 = grid.xi3(3);
        let rate = 2.0 * cfg.eps * cfg.eps * xi3 * xi3;
        let e0 = outcome.history[0].energy;
        let bound = e0 * rate * (rate * cfg.dt) * (rate * cfg.dt) / 6.0;
        assert!(
            e.max_residual <= bound.max(1e-14),
            "residual {} bound {}",
            e.max_residual,
            bound
        );
    }

    #[test]
    fn cfl_guard_trips_on_violent_data() {
        let grid = Grid::new(8, 16, 16.0 * std::f64::consts::PI).unwrap();
        let mut cfg = SolverConfig::new(grid.clone(), 1.0).unwrap();
        cfg.dt = 0.5; // way beyond any advective limit for O(10) velocities
        cfg.t_max = 5.0;
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(0, 1, 0, Complex64::new(12.0, 0.0));
        let v0 = [f, SpectralField::zeros(&grid), SpectralField::zeros(&grid)];
        let outcome = run_to_outcome(cfg, &v0).unwrap();
        assert!(matches!(outcome.class, RunClass::CflExceeded { .. }));
    }
}
