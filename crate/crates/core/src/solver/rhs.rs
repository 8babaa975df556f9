//! Tendencies of the projected rescaled system in the `(w^h, w^3, vbar^h)`
//! decomposition. The nonlinearity uses the conservative form
//! `v . grad v^i = sum_k d_k (v^k v^i)`, which together with the spectral
//! pressure makes the divergence of the full tendency vanish identically on
//! the grid.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{AnisotropicSymbol, Grid, SpectralField};

use super::pressure::{pair_index, pressure_from_products, ProductSet};
use super::state::{VelocityState, VerticalProfile};

/// Right-hand sides for each block of the state, plus the pressure that
/// enforced them and the physical sup of `|v|` (for the CFL guard).
pub struct Tendencies {
    pub w_h: [SpectralField; 2],
    pub w3: SpectralField,
    pub vbar_h: [VerticalProfile; 2],
    pub pressure: SpectralField,
    pub sup_velocity: f64,
    /// When false the linear `Delta_eps` part is left out (integrating
    /// factor stepping evaluates it exactly).
    pub includes_linear: bool,
}

/// Nonlinear-plus-pressure tendencies (no linear part): the form consumed
/// by the integrating-factor stepper.
pub fn nonlinear_tendency(
    state: &VelocityState,
    eps: f64,
    n_radius: f64,
) -> Result<Tendencies> {
    let grid = state.grid().clone();
    let mask = super::pressure::ModeMask::new(&grid, Some((n_radius, eps)));
    nonlinear_tendency_with_mask(state, eps, &mask)
}

/// As [`nonlinear_tendency`] with a prebuilt retained-mode mask.
pub fn nonlinear_tendency_with_mask(
    state: &VelocityState,
    eps: f64,
    mask: &super::pressure::ModeMask,
) -> Result<Tendencies> {
    let grid = state.grid().clone();
    let v = [
        state.full_component(0),
        state.full_component(1),
        state.full_component(2),
    ];
    let products = ProductSet::compute_with_mask([&v[0], &v[1], &v[2]], &grid, mask)?;
    let q = pressure_from_products(&products, &grid, eps);

    let mut t1 = SpectralField::zeros(&grid);
    let mut t2 = SpectralField::zeros(&grid);
    let mut t3 = SpectralField::zeros(&grid);
    let mut vb1 = VerticalProfile::zeros(&grid);
    let mut vb2 = VerticalProfile::zeros(&grid);

    let (n1, n2, n3) = grid.shape();
    let kh = grid.k_h_table();
    let xv = grid.xi3_table();
    let qs = [
        products.q[0].coeffs().as_slice().expect("layout"),
        products.q[1].coeffs().as_slice().expect("layout"),
        products.q[2].coeffs().as_slice().expect("layout"),
        products.q[3].coeffs().as_slice().expect("layout"),
        products.q[4].coeffs().as_slice().expect("layout"),
        products.q[5].coeffs().as_slice().expect("layout"),
    ];
    let qp = q.coeffs().as_slice().expect("layout");
    {
        let o1 = t1.coeffs_mut().as_slice_mut().expect("layout");
        let o2 = t2.coeffs_mut().as_slice_mut().expect("layout");
        let o3 = t3.coeffs_mut().as_slice_mut().expect("layout");
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..n1 {
            let k1 = kh[i];
            for j in 0..n2 {
                let k2 = kh[j];
                let base = (i * n2 + j) * n3;
                if k1 == 0.0 && k2 == 0.0 {
                    // Mean-flow block: d_t vbar^h = -d_3 M(w^3 w^h); the
                    // vertical mean equation is identically zero.
                    for k in 0..n3 {
                        let x3 = xv[k];
                        vb1.coeffs_mut()[k] = -(i_unit * x3) * qs[2][base + k];
                        vb2.coeffs_mut()[k] = -(i_unit * x3) * qs[4][base + k];
                    }
                    continue;
                }
                for k in 0..n3 {
                    let x3 = xv[k];
                    let f = base + k;
                    // NL_a = sum_b i xi_b F(v^b v^a): order (11,12,13,22,23,33).
                    let nl1 = i_unit * (k1 * qs[0][f] + k2 * qs[1][f] + x3 * qs[2][f]);
                    let nl2 = i_unit * (k1 * qs[1][f] + k2 * qs[3][f] + x3 * qs[4][f]);
                    let nl3 = i_unit * (k1 * qs[2][f] + k2 * qs[4][f] + x3 * qs[5][f]);
                    let qv = qp[f];
                    o1[f] = -(nl1 + i_unit * k1 * qv);
                    o2[f] = -(nl2 + i_unit * k2 * qv);
                    o3[f] = -(nl3 + i_unit * (eps * eps * x3) * qv);
                }
            }
        }
    }

    Ok(Tendencies {
        w_h: [t1, t2],
        w3: t3,
        vbar_h: [vb1, vb2],
        pressure: q,
        sup_velocity: products.sup_velocity,
        includes_linear: false,
    })
}

/// Full tendencies including the exact linear parts: `Delta_eps` on the `w`
/// blocks and `eps^2 d_3^2` on the mean flow.
pub fn rhs_eval(state: &VelocityState, eps: f64, n_radius: f64) -> Result<Tendencies> {
    let mut t = nonlinear_tendency(state, eps, n_radius)?;
    let sym = AnisotropicSymbol::new(eps);
    for (i, w) in state.w_h.iter().enumerate() {
        add_multiplied(&mut t.w_h[i], w, &sym);
    }
    add_multiplied(&mut t.w3, &state.w3, &sym);
    for (i, p) in state.vbar_h.iter().enumerate() {
        for (m, c) in p.coeffs().iter().enumerate() {
            let x3 = p.xi3(m);
            t.vbar_h[i].coeffs_mut()[m] -= eps * eps * x3 * x3 * c;
        }
    }
    t.includes_linear = true;
    Ok(t)
}

fn add_multiplied(dst: &mut SpectralField, src: &SpectralField, sym: &AnisotropicSymbol) {
    let grid = src.grid().clone();
    ndarray::Zip::indexed(dst.coeffs_mut())
        .and(src.coeffs())
        .for_each(|idx, d, s| {
            let (k1, k2, x3) = grid.wavenumber(idx);
            *d -= sym.xi_eps_sq(k1, k2, x3) * s;
        });
}

/// Divergence of the full tendency field (plain spectral divergence of the
/// assembled three components). Vanishes to rounding by construction.
pub fn tendency_divergence_residual(t: &Tendencies, grid: &Grid) -> f64 {
    let mut v1 = t.w_h[0].clone();
    t.vbar_h[0].add_to_column(&mut v1);
    let mut v2 = t.w_h[1].clone();
    t.vbar_h[1].add_to_column(&mut v2);
    let _ = grid;
    crate::spectral::divergence_residual(&v1, &v2, &t.w3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::solver::initial::state_from_fields;
    use crate::spectral::Grid;

    #[test]
    fn zero_state_has_zero_tendencies() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let state = VelocityState::zeros(&grid);
        let t = rhs_eval(&state, 0.5, 5.0).unwrap();
        assert_eq!(t.w_h[0].max_coeff_modulus(), 0.0);
        assert_eq!(t.w3.max_coeff_modulus(), 0.0);
        assert_eq!(t.vbar_h[0].max_modulus(), 0.0);
        assert_eq!(t.sup_velocity, 0.0);
    }

    #[test]
    fn pure_mean_flow_reduces_to_vertical_heat() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let eps = 0.5;
        let mut state = VelocityState::zeros(&grid);
        // vbar1 = cos(x3 * pi/L * 2): modes m = +-2.
        let f = SpectralField::from_physical(&grid, |_, _, x3| {
            (2.0 * std::f64::consts::PI / 4.0 * x3).cos()
        });
        state.vbar_h[0] = VerticalProfile::from_field(&f);
        let t = rhs_eval(&state, eps, 5.0).unwrap();
        // w tendencies vanish; vbar tendency is -eps^2 xi3^2 vbar.
        assert!(t.w_h[0].max_coeff_modulus() < 1e-14);
        assert!(t.w_h[1].max_coeff_modulus() < 1e-14);
        assert!(t.w3.max_coeff_modulus() < 1e-14);
        let xi3 = grid.xi3(2);
        let expect = -eps * eps * xi3 * xi3 * 0.5;
        let got = t.vbar_h[0].coeffs()[2].re;
        assert!((got - expect).abs() < 1e-13, "got {got} expect {expect}");
        assert!(t.vbar_h[1].max_modulus() < 1e-14);
    }

    #[test]
    fn tendency_divergence_vanishes_on_random_states() {
        let grid = Grid::new(16, 16, 4.0).unwrap();
        let eps = 0.5;
        for seed in [1u64, 2, 3] {
            let v = corpus::random_divergence_free(&grid, seed, 0.3, 1.5);
            let state = state_from_fields(&v, 0.0);
            let t = rhs_eval(&state, eps, 4.0).unwrap();
            let res = tendency_divergence_residual(&t, &grid);
            assert!(res <= 1e-10, "divergence residual {res}");
        }
    }

    #[test]
    fn w_tendencies_have_zero_horizontal_average() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let v = corpus::random_divergence_free(&grid, 9, 0.3, 1.5);
        let state = state_from_fields(&v, 0.0);
        let t = rhs_eval(&state, 0.5, 4.0).unwrap();
        for f in [&t.w_h[0], &t.w_h[1], &t.w3] {
            for m in 0..grid.n_v() {
                assert_eq!(f.coeffs()[(0, 0, m)].norm(), 0.0);
            }
        }
    }
}
