//! Decomposed solution state `(w^h, w^3, vbar^h)` of the projected rescaled
//! system and the run configuration.

use ndarray::Zip;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{AnisotropicSymbol, Grid, SpectralField};

/// Spectral coefficients of a function of the vertical coordinate alone
/// (the `xi_h = 0` column).
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalProfile {
    n_v: usize,
    l_vert: f64,
    coeffs: Vec<Complex64>,
}

impl VerticalProfile {
    pub fn zeros(grid: &Grid) -> Self {
        VerticalProfile {
            n_v: grid.n_v(),
            l_vert: grid.l_vert(),
            coeffs: vec![Complex64::ZERO; grid.n_v()],
        }
    }

    /// Extract the horizontal average of a field as a profile.
    pub fn from_field(f: &SpectralField) -> Self {
        let grid = f.grid();
        let coeffs = (0..grid.n_v()).map(|m| f.coeffs()[(0, 0, m)]).collect();
        VerticalProfile {
            n_v: grid.n_v(),
            l_vert: grid.l_vert(),
            coeffs,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn xi3(&self, i: usize) -> f64 {
        let m = if i <= self.n_v / 2 {
            i as i64
        } else {
            i as i64 - self.n_v as i64
        };
        m as f64 * std::f64::consts::PI / self.l_vert
    }

    /// Add this profile onto the `xi_h = 0` column of a field.
    pub fn add_to_column(&self, f: &mut SpectralField) {
        for (m, c) in self.coeffs.iter().enumerate() {
            f.coeffs_mut()[(0, 0, m)] += c;
        }
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += b * s;
        }
    }

    pub fn scale_by_mode<F: Fn(f64) -> f64>(&mut self, f: F) {
        for i in 0..self.n_v {
            let xi3 = self.xi3(i);
            self.coeffs[i] *= f(xi3);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// The decomposed velocity `(w^h, w^3, vbar^h)` at a fixed time.
///
/// `w` components carry zero horizontal average by construction; `vbar^3`
/// vanishes identically because the field is divergence free.
#[derive(Debug, Clone)]
pub struct VelocityState {
    pub w_h: [SpectralField; 2],
    pub w3: SpectralField,
    pub vbar_h: [VerticalProfile; 2],
    pub t: f64,
}

impl VelocityState {
    pub fn zeros(grid: &Grid) -> Self {
        VelocityState {
            w_h: [SpectralField::zeros(grid), SpectralField::zeros(grid)],
            w3: SpectralField::zeros(grid),
            vbar_h: [VerticalProfile::zeros(grid), VerticalProfile::zeros(grid)],
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.w3.grid()
    }

    /// Assemble the full spectral velocity component `i` (0, 1: horizontal
    /// with the mean flow added back; 2: vertical).
    pub fn full_component(&self, i: usize) -> SpectralField {
        match i {
            0 | 1 => {
                let mut f = self.w_h[i].clone();
                self.vbar_h[i].add_to_column(&mut f);
                f
            }
            2 => self.w3.clone(),
            _ => panic!("component index out of range"),
        }
    }

    /// Max modulus of the spectral divergence of the assembled velocity.
    pub fn divergence_residual(&self) -> f64 {
        let v1 = self.full_component(0);
        let v2 = self.full_component(1);
        crate::spectral::divergence_residual(&v1, &v2, &self.w3)
    }

    /// Largest coefficient modulus outside the anisotropic ball
    /// `|xi_eps| <= n` over all components.
    pub fn spectrum_outside(&self, n: f64, eps: f64) -> f64 {
        let sym = AnisotropicSymbol::new(eps);
        let n_sq = n * n;
        let grid = self.grid().clone();
        let mut worst: f64 = 0.0;
        for f in [&self.w_h[0], &self.w_h[1], &self.w3] {
            Zip::indexed(f.coeffs()).for_each(|idx, c| {
                let (k1, k2, x3) = grid.wavenumber(idx);
                if sym.xi_eps_sq(k1, k2, x3) > n_sq {
                    worst = worst.max(c.norm());
                }
            });
        }
        for p in &self.vbar_h {
            for (i, c) in p.coeffs().iter().enumerate() {
                let x3 = p.xi3(i);
                if sym.xi_eps_sq(0.0, 0.0, x3) > n_sq {
                    worst = worst.max(c.norm());
                }
            }
        }
        worst
    }

    /// Largest modulus of the horizontal average of the `w` components
    /// (identically zero when the invariant holds).
    pub fn mean_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for f in [&self.w_h[0], &self.w_h[1], &self.w3] {
            for m in 0..self.grid().n_v() {
                worst = worst.max(f.coeffs()[(0, 0, m)].norm());
            }
        }
        worst
    }

    /// Anisotropically weighted kinetic energy
    /// `1/2 (||v^h||^2 + eps^{-2} ||v^3||^2)`.
    pub fn energy(&self, eps: f64) -> f64 {
        let mut e = 0.0;
        for i in 0..2 {
            e += self.w_h[i].l2_norm().powi(2) + self.vbar_h[i].l2_norm_sq();
        }
        e += self.w3.l2_norm().powi(2) / (eps * eps);
        0.5 * e
    }

    /// Dissipation rate `||grad_eps v^h||^2 + eps^{-2} ||grad_eps v^3||^2`,
    /// the exact negative time derivative of [`Self::energy`] for the
    /// semi-discrete system.
    pub fn dissipation(&self, eps: f64) -> f64 {
        let sym = AnisotropicSymbol::new(eps);
        let grid = self.grid().clone();
        let mut d = 0.0;
        for (i, f) in [&self.w_h[0], &self.w_h[1], &self.w3].into_iter().enumerate() {
            let weight = if i == 2 { 1.0 / (eps * eps) } else { 1.0 };
            let mut acc = 0.0;
            Zip::indexed(f.coeffs()).for_each(|idx, c| {
                let (k1, k2, x3) = grid.wavenumber(idx);
                acc += sym.xi_eps_sq(k1, k2, x3) * c.norm_sqr();
            });
            d += weight * acc;
        }
        for p in &self.vbar_h {
            for (i, c) in p.coeffs().iter().enumerate() {
                let x3 = p.xi3(i);
                d += eps * eps * x3 * x3 * c.norm_sqr();
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.w_h.iter().all(|f| {
            f.coeffs()
                .iter()
                .all(|c| c.re.is_finite() && c.im.is_finite())
        }) && self
            .w3
            .coeffs()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
            && self.vbar_h.iter().all(|p| p.is_finite())
    }
}

/// Fixed parameters of a solver run.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: Grid,
    pub eps: f64,
    pub a: f64,
    pub lambda: f64,
    /// Friedrichs radius in the `|xi_eps|` metric.
    pub n_radius: f64,
    pub dt: f64,
    pub t_max: f64,
    /// CFL guard: the run halts if `dt > cfl_fraction * dx / ||v||_inf`.
    pub cfl_fraction: f64,
    /// Warn when the top dyadic shell carries more than this fraction of
    /// the `B^{7/2}` norm of the weighted fields.
    pub tail_warn_fraction: f64,
}

/// Largest `|xi_eps|` representable on the dealiased grid.
pub fn max_xi_eps(grid: &Grid, eps: f64) -> f64 {
    let ch = grid.dealias_cutoff_h() as f64;
    let cv = grid.dealias_cutoff_v() as f64 * grid.xi3_spacing();
    (2.0 * ch * ch + eps * eps * cv * cv).sqrt()
}

impl SolverConfig {
    /// Defaults mirroring the reference desk-scale setup; the Friedrichs
    /// radius is `0.9` of the largest dealiased horizontal wavenumber.
    pub fn new(grid: Grid, eps: f64) -> Result<Self> {
        let n_radius = 0.9 * grid.dealias_cutoff_h() as f64;
        let cfg = SolverConfig {
            grid,
            eps,
            a: 1.0,
            lambda: 32.0,
            n_radius,
            dt: 1e-3,
            t_max: 10.0,
            cfl_fraction: 0.5,
            tail_warn_fraction: 0.01,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps = {} must lie in (0, 1]",
                self.eps
            )));
        }
        let max_xi_eps = max_xi_eps(&self.grid, self.eps);
        if self.n_radius > max_xi_eps {
            return Err(Error::InvalidConfig(format!(
                "Friedrichs radius {} exceeds the grid's |xi_eps| range {max_xi_eps}",
                self.n_radius
            )));
        }
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.a > 0.0 && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(
                "dt, t_max, a, lambda must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-step record of the monitored norms and bootstrap margins.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub step: u64,
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
    /// Bootstrap margin `a - lambda * theta`.
    pub margin: f64,
    pub b72_w3_phi: f64,
    /// `eps * ||w^h_Phi||_{B^{7/2}}`.
    pub eps_b72_wh_phi: f64,
    pub ltilde_v_phi: f64,
    pub ltilde_vh_phi: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub div_residual: f64,
}

impl StepDiagnostics {
    pub const CSV_HEADER: &'static str = "step,t,theta,theta_dot,margin,b72_w3_phi,eps_b72_wh_phi,ltilde_v_phi,ltilde_vh_phi,energy,dissipation,div_residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.step,
            self.t,
            self.theta,
            self.theta_dot,
            self.margin,
            self.b72_w3_phi,
            self.eps_b72_wh_phi,
            self.ltilde_v_phi,
            self.ltilde_vh_phi,
            self.energy,
            self.dissipation,
            self.div_residual
        )
    }
}
