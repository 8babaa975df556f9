//! Initial-data library for the rescaled system: divergence-free profiles
//! on the slow grid, the `M / M^perp` split into solver state, and the exact
//! Fourier dilation back to physical variables (where the vertical component
//! carries the `1/eps` factor).

use crate::besov::{besov_from_profile, vector_shell_l2_profile, SeparableWeight, ShellMap};
use crate::error::{Error, Result};
use crate::spectral::ops::dealias_in_place;
use crate::spectral::{friedrichs_project, horizontal_average, m_perp, Grid, SpectralField};

use super::state::{VelocityState, VerticalProfile};

/// Family of divergence-free profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// Pure 2D stream-function data `(d_2 phi, -d_1 phi, 0)` with a vertical
    /// envelope; the vertical component vanishes.
    WellPrepared,
    /// Adds a vertical component `c(x_h) g(x_3)` compensated through
    /// `Delta_h^{-1}` so the field stays divergence free; the physical data
    /// then carries the `1/eps` factor on the third component.
    IllPrepared,
}

/// Profile parameters; amplitudes are relative, the overall scale is set by
/// [`scale_to_eta`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    /// Width of the vertical Gaussian envelope `exp(-(x3/sigma)^2)`. The
    /// default 6 keeps the vertical spectrum inside the dealiased band on
    /// desk-scale grids (64 vertical modes and up at L = 16 pi) while the
    /// periodisation tail at |x3| = L stays far below the decay floor.
    pub sigma: f64,
    /// Relative amplitude of the stream-function part.
    pub stream_amplitude: f64,
    /// Relative amplitude of the vertical component (ill-prepared only).
    pub vertical_amplitude: f64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec {
            kind: ProfileKind::IllPrepared,
            sigma: 6.0,
            stream_amplitude: 0.25,
            vertical_amplitude: 1.0,
        }
    }
}

/// Build the (unnormalised) profile fields on the slow grid.
pub fn build_profile(grid: &Grid, spec: &ProfileSpec) -> [SpectralField; 3] {
    let sigma = spec.sigma;
    let envelope = move |x3: f64| (-(x3 / sigma) * (x3 / sigma)).exp();

    // Stream part: (d_2, -d_1) of phi(x_h) * g(x3).
    let s_amp = spec.stream_amplitude;
    let stream1 = SpectralField::from_physical(grid, move |x1, x2, x3| {
        s_amp * x1.cos() * x2.cos() * envelope(x3)
    });
    let stream2 = SpectralField::from_physical(grid, move |x1, x2, x3| {
        s_amp * x1.sin() * x2.sin() * envelope(x3)
    });
    // (stream1, stream2) = (d_2, -d_1)[cos(x1) sin(x2) g(x3)]: divergence
    // free by construction.

    let mut v = [stream1, stream2, SpectralField::zeros(grid)];

    if spec.kind == ProfileKind::IllPrepared {
        let v_amp = spec.vertical_amplitude;
        let c_g = SpectralField::from_physical(grid, move |x1, x2, x3| {
            v_amp * (2.0 * x1).sin() * (2.0 * x2).sin() * envelope(x3)
        });
        // Compensation: v^h = -grad_h Delta_h^{-1} d_3 (c g), built from the
        // spectral vertical derivative of the sampled envelope so that
        // div v = 0 holds on the grid exactly (not just up to the envelope's
        // spectral tail). Component symbol: -(i k_i)(i xi_3)/(-|k_h|^2) =
        // -k_i xi_3 / |k_h|^2.
        for i in 0..2 {
            let comp = c_g.multiplied(move |k1, k2, x3| {
                let kh_sq = k1 * k1 + k2 * k2;
                if kh_sq == 0.0 {
                    num_complex::Complex64::ZERO
                } else {
                    let ki = if i == 0 { k1 } else { k2 };
                    num_complex::Complex64::new(-ki * x3 / kh_sq, 0.0)
                }
            });
            v[i].add_assign_scaled(&comp, 1.0);
        }
        v[2] = c_g;
    }

    for f in v.iter_mut() {
        dealias_in_place(f);
    }
    v
}

/// Weighted-norm report of an initial profile.
#[derive(Debug, Clone, Copy)]
pub struct InitialReport {
    /// `||e^{a|D_3|} v_0||_{B^{7/2}}` (all three components).
    pub v0_b72: f64,
    /// Horizontal components only.
    pub v0h_b72: f64,
    /// `eps ||e^{a|D_3|} w_0^h||_{B^{7/2}}` plus `||e^{a|D_3|} w_0^3||`,
    /// the initial-data side of the loss estimate.
    pub w0h_b72: f64,
    pub w03_b72: f64,
    /// Largest physical magnitude on the boundary plane `x_3 = -L`.
    pub vertical_tail: f64,
    pub div_residual: f64,
}

/// Split validated divergence-free fields into solver state (no checks).
pub fn state_from_fields(v: &[SpectralField; 3], t: f64) -> VelocityState {
    let w1 = m_perp(&v[0]);
    let w2 = m_perp(&v[1]);
    let w3 = m_perp(&v[2]);
    let vbar1 = VerticalProfile::from_field(&horizontal_average(&v[0]));
    let vbar2 = VerticalProfile::from_field(&horizontal_average(&v[1]));
    VelocityState {
        w_h: [w1, w2],
        w3,
        vbar_h: [vbar1, vbar2],
        t,
    }
}

/// Validate, project and split a profile into the initial solver state,
/// reporting its weighted norms and tail.
pub fn make_initial_data(
    v0: &[SpectralField; 3],
    a: f64,
    eps: f64,
    n_radius: f64,
) -> Result<(VelocityState, InitialReport)> {
    let grid = v0[0].grid().clone();
    let scale = v0
        .iter()
        .map(|f| f.max_coeff_modulus())
        .fold(0.0, f64::max);
    let residual = crate::spectral::divergence_residual(&v0[0], &v0[1], &v0[2]);
    if residual > 1e-10 * scale.max(1.0) {
        return Err(Error::NotDivergenceFree { residual });
    }

    let projected: Vec<SpectralField> = v0
        .iter()
        .map(|f| {
            let mut g = friedrichs_project(f, n_radius, eps);
            dealias_in_place(&mut g);
            g
        })
        .collect();
    let projected: [SpectralField; 3] = [
        projected[0].clone(),
        projected[1].clone(),
        projected[2].clone(),
    ];

    let map = ShellMap::new(&grid);
    let weight = SeparableWeight::vertical_exp(&grid, a)?;
    let state = state_from_fields(&projected, 0.0);

    let all = [&projected[0], &projected[1], &projected[2]];
    let v0_b72 = besov_from_profile(&vector_shell_l2_profile(&map, &all, Some(&weight)), 3.5);
    let v0h_b72 = besov_from_profile(
        &vector_shell_l2_profile(&map, &all[..2], Some(&weight)),
        3.5,
    );
    let w0h_b72 = besov_from_profile(
        &vector_shell_l2_profile(&map, &[&state.w_h[0], &state.w_h[1]], Some(&weight)),
        3.5,
    );
    let w03_b72 =
        besov_from_profile(&vector_shell_l2_profile(&map, &[&state.w3], Some(&weight)), 3.5);

    let mut tail: f64 = 0.0;
    for f in all {
        let phys = f.to_physical()?;
        for i in 0..grid.n_h() {
            for j in 0..grid.n_h() {
                tail = tail.max(phys[(i, j, 0)].abs());
            }
        }
    }

    Ok((
        state,
        InitialReport {
            v0_b72,
            v0h_b72,
            w0h_b72,
            w03_b72,
            vertical_tail: tail,
            div_residual: residual,
        },
    ))
}

/// Scale profile fields so that `||e^{a|D_3|} v_0||_{B^{7/2}}` equals the
/// target (the norm is exactly linear in the amplitude).
pub fn scale_to_eta(v0: &[SpectralField; 3], a: f64, eta: f64) -> Result<[SpectralField; 3]> {
    let grid = v0[0].grid().clone();
    let map = ShellMap::new(&grid);
    let weight = SeparableWeight::vertical_exp(&grid, a)?;
    let all = [&v0[0], &v0[1], &v0[2]];
    let norm = besov_from_profile(&vector_shell_l2_profile(&map, &all, Some(&weight)), 3.5);
    if norm == 0.0 {
        return Err(Error::InvalidConfig(
            "cannot scale a zero profile to a target norm".into(),
        ));
    }
    let s = eta / norm;
    Ok([v0[0].scaled(s), v0[1].scaled(s), v0[2].scaled(s)])
}

/// Physical-variables velocity on the tall grid `T^2 x T_{L/eps}`.
pub struct PhysicalVelocity {
    pub grid: Grid,
    pub components: [SpectralField; 3],
}

/// Undo the vertical rescaling: `u^h(x) = v^h(x_h, eps x_3)`, `u^3 = (1/eps)
/// v^3(x_h, eps x_3)`. Dilation is an exact relabelling of the vertical
/// wavenumbers (`xi_3 -> eps xi_3` via the enlarged half-period `L/eps`).
pub fn rescale_to_physical(state: &VelocityState, eps: f64) -> Result<PhysicalVelocity> {
    let slow = state.grid().clone();
    let tall = Grid::new(slow.n_h(), slow.n_v(), slow.l_vert() / eps)?;
    let mut comps = Vec::with_capacity(3);
    for i in 0..3 {
        let f = state.full_component(i);
        let scale = if i == 2 { 1.0 / eps } else { 1.0 };
        let coeffs = f.coeffs().mapv(|c| c * scale);
        comps.push(SpectralField::from_coeffs(&tall, coeffs)?);
    }
    Ok(PhysicalVelocity {
        grid: tall,
        components: [comps[0].clone(), comps[1].clone(), comps[2].clone()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::divergence_residual;

    fn grid() -> Grid {
        // The envelope needs the vertical band of a 64-mode column at this
        // half-period; 8 horizontal modes keep the tests cheap.
        Grid::new(8, 64, 16.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn profiles_are_divergence_free_with_small_tail() {
        let grid = grid();
        for kind in [ProfileKind::WellPrepared, ProfileKind::IllPrepared] {
            let spec = ProfileSpec {
                kind,
                ..ProfileSpec::default()
            };
            let v = build_profile(&grid, &spec);
            let res = divergence_residual(&v[0], &v[1], &v[2]);
            let scale = v.iter().map(|f| f.max_coeff_modulus()).fold(0.0, f64::max);
            assert!(res <= 1e-12 * scale.max(1.0), "{kind:?}: residual {res}");
            let n = crate::solver::state::max_xi_eps(&grid, 0.5);
            let (_, report) = make_initial_data(&v, 1.0, 0.5, n).unwrap();
            assert!(report.vertical_tail < 1e-8, "tail {}", report.vertical_tail);
            if kind == ProfileKind::WellPrepared {
                assert_eq!(report.w03_b72, 0.0);
            } else {
                assert!(report.w03_b72 > 0.0);
            }
        }
    }

    #[test]
    fn zero_profile_maps_to_zero_state() {
        let grid = grid();
        let z = [
            SpectralField::zeros(&grid),
            SpectralField::zeros(&grid),
            SpectralField::zeros(&grid),
        ];
        let (state, report) = make_initial_data(&z, 1.0, 0.5, 2.0).unwrap();
        assert_eq!(state.w3.max_coeff_modulus(), 0.0);
        assert_eq!(report.v0_b72, 0.0);
    }

    #[test]
    fn non_divergence_free_profiles_are_rejected() {
        let grid = grid();
        let bad = [
            SpectralField::from_physical(&grid, |x1, _, _| x1.cos()),
            SpectralField::zeros(&grid),
            SpectralField::zeros(&grid),
        ];
        assert!(matches!(
            make_initial_data(&bad, 1.0, 0.5, 2.0),
            Err(Error::NotDivergenceFree { .. })
        ));
    }

    #[test]
    fn eta_scaling_is_exact() {
        let grid = grid();
        let v = build_profile(&grid, &ProfileSpec::default());
        let scaled = scale_to_eta(&v, 1.0, 1.0 / 128.0).unwrap();
        let n = crate::solver::state::max_xi_eps(&grid, 0.5);
        let (_, report) = make_initial_data(&scaled, 1.0, 0.5, n).unwrap();
        assert!((report.v0_b72 - 1.0 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn physical_third_component_scales_like_inverse_eps() {
        let grid = grid();
        let v = build_profile(&grid, &ProfileSpec::default());
        let state = state_from_fields(&v, 0.0);
        let mut amps = Vec::new();
        for eps in [1.0, 0.5, 0.25] {
            let phys = rescale_to_physical(&state, eps).unwrap();
            amps.push(phys.components[2].max_coeff_modulus());
            // Exactly divergence free in physical variables.
            let res = divergence_residual(
                &phys.components[0],
                &phys.components[1],
                &phys.components[2],
            );
            assert!(res < 1e-12, "physical residual {res}");
        }
        assert!((amps[1] / amps[0] - 2.0).abs() < 1e-12);
        assert!((amps[2] / amps[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn well_prepared_physical_field_has_zero_third_component() {
        let grid = grid();
        let spec = ProfileSpec {
            kind: ProfileKind::WellPrepared,
            ..ProfileSpec::default()
        };
        let v = build_profile(&grid, &spec);
        let state = state_from_fields(&v, 0.0);
        let phys = rescale_to_physical(&state, 0.25).unwrap();
        assert_eq!(phys.components[2].max_coeff_modulus(), 0.0);
    }
}
