//! The scalar model equation `u_t + gamma u + a(D)(u^2) = 0` with
//! analyticity-radius tracking: the pedagogical mechanism of the full
//! system, run end-to-end on a 1D grid.
//!
//! The loss variable solves `theta_dot = ||u_theta||_{F(L^1)}` where
//! `u_theta` carries the shrinking weight `e^{(delta - lambda theta)|xi|}`;
//! runs stay admissible while `delta - lambda theta > 0`.

pub mod diagram;
pub mod gain;
pub mod spectrum;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use diagram::{locate_global_threshold, phase_diagram, DiagramCell, ThresholdReport};
pub use gain::{gain_integral_check, GainCheck};
pub use spectrum::Spectrum1;

/// The order-one Fourier multiplier `a(D)` in front of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplier {
    /// `a(xi) = i xi` (the spatial derivative; keeps the field real).
    Derivative,
    /// `a(xi) = |xi|`.
    Modulus,
}

impl Multiplier {
    #[inline]
    pub fn symbol(self, xi: f64) -> Complex64 {
        match self {
            Multiplier::Derivative => Complex64::new(0.0, xi),
            Multiplier::Modulus => Complex64::new(xi.abs(), 0.0),
        }
    }
}

/// Fixed parameters of a model run.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    pub dt: f64,
    pub multiplier: Multiplier,
    /// Per-step cap on `theta_dot * dt`; steps shrink to keep the loss
    /// variable resolved near a breach.
    pub theta_step_cap: f64,
    /// Explicit-nonlinearity stability fraction: `dt <= cfl / (xi_max *
    /// ||u||)`.
    pub cfl_fraction: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            gamma: 1.0,
            delta: 0.5,
            lambda: 10.0,
            dt: 1e-3,
            multiplier: Multiplier::Derivative,
            theta_step_cap: 2e-5,
            cfl_fraction: 0.25,
        }
    }
}

/// Evolving state: the field, the loss variable and the clock.
#[derive(Debug, Clone)]
pub struct ModelState {
    pub u: Spectrum1,
    pub theta: f64,
    pub t: f64,
}

impl ModelState {
    pub fn new(u0: Spectrum1) -> Self {
        ModelState {
            u: u0,
            theta: 0.0,
            t: 0.0,
        }
    }

    pub fn margin(&self, p: &ModelParams) -> f64 {
        p.delta - p.lambda * self.theta
    }
}

/// `||u0||_X = sum e^{delta |xi|} |u_hat(xi)|`.
pub fn x_norm(u: &Spectrum1, delta: f64) -> Result<f64> {
    u.weighted_fl1(delta)
}

/// Instantaneous `theta_dot` at the given state.
pub fn theta_rate(u: &Spectrum1, theta: f64, p: &ModelParams) -> Result<f64> {
    let band = p.delta - p.lambda * theta;
    if band <= 0.0 {
        return Err(Error::AdmissibilityViolated {
            lambda_theta: p.lambda * theta,
            a: p.delta,
        });
    }
    u.weighted_fl1(band)
}

fn nonlinear_rhs(u: &Spectrum1, p: &ModelParams) -> Spectrum1 {
    let mut sq = u.dealiased_square();
    let n = sq.n();
    for i in 0..n {
        let xi = sq.signed(i) as f64;
        let a = p.multiplier.symbol(xi);
        sq.coeffs_mut()[i] *= -a;
    }
    sq
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelClass {
    /// Reached `T_max` with `theta < delta/(2 lambda)` and terminal
    /// `F(L^1)` norm below `1e-6` of the initial one.
    Global,
    /// The admissibility margin `delta - lambda theta` hit zero at `t`.
    LostAdmissibility { t: f64 },
    /// Reached `T_max` without meeting the global criteria.
    Undecided,
    /// Overflow or NaN at `t`.
    NumericalBlowup { t: f64 },
}

/// One history sample per accepted step.
#[derive(Debug, Clone, Copy)]
pub struct HistorySample {
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

/// Completed (or halted) model run.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub class: ModelClass,
    pub theta_final: f64,
    pub margin_final: f64,
    pub t_final: f64,
    pub steps: u64,
    pub x_norm_initial: f64,
    pub fl1_initial: f64,
    pub fl1_final: f64,
    pub max_theta_dot: f64,
    pub history: Vec<HistorySample>,
}

/// Advance `(u, theta)` by one adaptive step of at most `p.dt`.
/// Returns the instantaneous rate used at the step start.
pub fn model_step(state: &mut ModelState, p: &ModelParams) -> Result<f64> {
    let rate0 = theta_rate(&state.u, state.theta, p)?;

    // Step-size control: resolve theta and respect explicit stability.
    let xi_max = state.u.dealias_cutoff() as f64;
    let mut dt = p.dt;
    if rate0 > 0.0 {
        dt = dt.min(p.theta_step_cap / rate0);
    }
    let amp = state.u.fl1(); // >= sup |u|
    if amp > 0.0 {
        dt = dt.min(p.cfl_fraction / (xi_max * amp));
    }

    // Integrating-factor Heun on the field: the damping is exact.
    let decay = (-p.gamma * dt).exp();
    let k1 = nonlinear_rhs(&state.u, p);
    let mut predictor = state.u.clone();
    add_scaled(&mut predictor, &k1, dt);
    scale_in_place(&mut predictor, decay);
    let k2 = nonlinear_rhs(&predictor, p);

    let mut next = state.u.scaled(decay);
    add_scaled(&mut next, &k1, decay * 0.5 * dt);
    add_scaled(&mut next, &k2, 0.5 * dt);

    if !next.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "numerical blowup at t = {}",
            state.t + dt
        )));
    }

    // Heun on theta, fields first.
    let theta_pred = state.theta + dt * rate0;
    let rate1 = theta_rate(&next, theta_pred, p)?;
    let theta_next = state.theta + 0.5 * dt * (rate0 + rate1);

    state.u = next;
    state.theta = theta_next;
    state.t += dt;
    Ok(rate0)
}

fn add_scaled(dst: &mut Spectrum1, src: &Spectrum1, s: f64) {
    for (d, c) in dst.coeffs_mut().iter_mut().zip(src.coeffs().iter()) {
        *d += c * s;
    }
}

fn scale_in_place(s: &mut Spectrum1, f: f64) {
    for c in s.coeffs_mut().iter_mut() {
        *c *= f;
    }
}

/// Early-exit policy for survey runs (bisection, phase diagrams). The
/// acceptance runs use `None` and integrate the full horizon.
#[derive(Debug, Clone, Copy)]
pub struct EarlyExit {
    pub decay_factor: f64,
    pub remaining_growth_fraction: f64,
}

impl Default for EarlyExit {
    fn default() -> Self {
        EarlyExit {
            decay_factor: 1e-9,
            remaining_growth_fraction: 0.01,
        }
    }
}

/// Integrate to `t_max`. The history holds one knot per accepted step start
/// plus a terminal knot, each carrying the instantaneous rate there.
pub fn run_model(
    u0: Spectrum1,
    p: &ModelParams,
    t_max: f64,
    early_exit: Option<EarlyExit>,
) -> Result<ModelRun> {
    let x0 = x_norm(&u0, p.delta)?;
    let fl1_0 = u0.fl1();
    let mut state = ModelState::new(u0);
    let mut history = Vec::new();
    let mut steps: u64 = 0;
    let mut max_rate: f64 = 0.0;
    let global_theta_bound = p.delta / (2.0 * p.lambda);

    // Rate at a knot, defined numerically even past the breach.
    let knot_rate =
        |u: &Spectrum1, theta: f64| u.weighted_fl1(p.delta - p.lambda * theta).unwrap_or(f64::NAN);

    let class = loop {
        if state.t >= t_max {
            break classify(&state, p, fl1_0, global_theta_bound);
        }
        let (t_pre, theta_pre) = (state.t, state.theta);
        match model_step(&mut state, p) {
            Ok(rate) => {
                max_rate = max_rate.max(rate);
                history.push(HistorySample {
                    t: t_pre,
                    theta: theta_pre,
                    theta_dot: rate,
                });
                steps += 1;
            }
            Err(Error::AdmissibilityViolated { .. }) => {
                break ModelClass::LostAdmissibility { t: state.t };
            }
            Err(Error::WeightOverflow { .. }) | Err(Error::InvalidConfig(_)) => {
                break ModelClass::NumericalBlowup { t: state.t };
            }
            Err(e) => return Err(e),
        }
        if let Some(exit) = early_exit {
            if state.u.fl1() <= exit.decay_factor * fl1_0 {
                let rate = knot_rate(&state.u, state.theta);
                let head_room = global_theta_bound - state.theta;
                if head_room > 0.0
                    && rate.is_finite()
                    && rate * (t_max - state.t) < exit.remaining_growth_fraction * head_room
                {
                    break classify(&state, p, fl1_0, global_theta_bound);
                }
            }
        }
    };

    history.push(HistorySample {
        t: state.t,
        theta: state.theta,
        theta_dot: knot_rate(&state.u, state.theta),
    });

    Ok(ModelRun {
        class,
        theta_final: state.theta,
        margin_final: state.margin(p),
        t_final: state.t,
        steps,
        x_norm_initial: x0,
        fl1_initial: fl1_0,
        fl1_final: state.u.fl1(),
        max_theta_dot: max_rate,
        history,
    })
}

fn classify(state: &ModelState, _p: &ModelParams, fl1_0: f64, bound: f64) -> ModelClass {
    let decayed = state.u.fl1() < 1e-6 * fl1_0 || fl1_0 == 0.0;
    if state.theta < bound && decayed {
        ModelClass::Global
    } else {
        ModelClass::Undecided
    }
}

/// The default multi-mode initial profile, scaled to a given amplitude.
pub fn default_profile(n: usize, amplitude: f64) -> Spectrum1 {
    let u = Spectrum1::from_physical(n, |x| {
        x.sin() + 0.6 * (2.0 * x).cos() + 0.3 * (3.0 * x + 0.4).sin()
    });
    u.scaled(amplitude)
}
