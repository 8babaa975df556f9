//! Differentiation multipliers, projections and products on spectral fields.

use ndarray::Zip;
use num_complex::Complex64;

use crate::error::Result;

use super::field::{same_grid, SpectralField};
use super::grid::Axis3;
use super::transform;

/// Anisotropic modulus `|xi_eps|^2 = |xi_h|^2 + eps^2 xi_3^2`.
#[derive(Debug, Clone, Copy)]
pub struct AnisotropicSymbol {
    pub eps: f64,
}

impl AnisotropicSymbol {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "anisotropy parameter must be positive");
        AnisotropicSymbol { eps }
    }

    #[inline]
    pub fn xi_eps_sq(&self, k1: f64, k2: f64, xi3: f64) -> f64 {
        k1 * k1 + k2 * k2 + self.eps * self.eps * xi3 * xi3
    }
}

/// Coefficient-wise `(i xi_axis)^order`, `order` in {1, 2}.
pub fn derivative(f: &SpectralField, axis: Axis3, order: u32) -> SpectralField {
    assert!(order == 1 || order == 2, "derivative order must be 1 or 2");
    f.multiplied(move |k1, k2, x3| {
        let xi = match axis {
            Axis3::X1 => k1,
            Axis3::X2 => k2,
            Axis3::X3 => x3,
        };
        match order {
            1 => Complex64::new(0.0, xi),
            _ => Complex64::new(-xi * xi, 0.0),
        }
    })
}

/// The horizontal average `M f`: keeps only modes with `xi_h = 0`.
pub fn horizontal_average(f: &SpectralField) -> SpectralField {
    f.retain(|k1, k2, _| k1 == 0.0 && k2 == 0.0)
}

/// The complement `M^perp f = f - M f`: zeroes the `xi_h = 0` column.
pub fn m_perp(f: &SpectralField) -> SpectralField {
    f.retain(|k1, k2, _| k1 != 0.0 || k2 != 0.0)
}

/// 2/3-rule dealiasing: zero every coefficient with an index above 2/3 of
/// Nyquist on any axis. Idempotent.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let grid = f.grid().clone();
    Zip::indexed(f.coeffs_mut()).for_each(|idx, c| {
        if !grid.in_dealias_box(idx) {
            *c = Complex64::ZERO;
        }
    });
}

/// Friedrichs projection `P_{n,eps}`: zero coefficients outside the
/// anisotropic ball `|xi_h|^2 + eps^2 xi_3^2 <= n^2`. Idempotent, commutes
/// with derivatives and with the horizontal average.
pub fn friedrichs_project(f: &SpectralField, n: f64, eps: f64) -> SpectralField {
    let sym = AnisotropicSymbol::new(eps);
    let n_sq = n * n;
    f.retain(move |k1, k2, x3| sym.xi_eps_sq(k1, k2, x3) <= n_sq)
}

/// The map `f -> f^+`: coefficient-wise modulus. Preserves every `B^s` norm.
pub fn plus_modulus(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    for c in out.coeffs_mut().iter_mut() {
        *c = Complex64::new(c.norm(), 0.0);
    }
    out
}

/// Pseudo-spectral product: synthesise, multiply pointwise, analyse, dealias.
///
/// For inputs already confined to the dealias box the result is the exact
/// spectral convolution restricted to retained modes.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    same_grid(a, b)?;
    let grid = a.grid().clone();
    let (pa, pb) = transform::inverse_pair(&grid, a.coeffs(), b.coeffs());
    let prod = &pa * &pb;
    let mut out = SpectralField::from_samples(&grid, &prod)?;
    dealias_in_place(&mut out);
    Ok(out)
}

/// Dense direct convolution on the full index lattice (periodic), the
/// independent oracle for product routines. Quadratic cost; intended for
/// grids of at most ~16^3.
pub fn dense_convolution(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    same_grid(a, b)?;
    let grid = a.grid().clone();
    let (n1, n2, n3) = grid.shape();
    let mut out = SpectralField::zeros(&grid);
    for i1 in 0..n1 {
        for j1 in 0..n2 {
            for k1 in 0..n3 {
                let ca = a.coeffs()[(i1, j1, k1)];
                if ca.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..n1 {
                    for j2 in 0..n2 {
                        for k2 in 0..n3 {
                            let cb = b.coeffs()[(i2, j2, k2)];
                            if cb.norm_sqr() == 0.0 {
                                continue;
                            }
                            let idx = ((i1 + i2) % n1, (j1 + j2) % n2, (k1 + k2) % n3);
                            out.coeffs_mut()[idx] += ca * cb;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Max modulus of `div f` over all modes, the divergence being evaluated
/// spectrally with plain derivatives.
pub fn divergence_residual(f1: &SpectralField, f2: &SpectralField, f3: &SpectralField) -> f64 {
    let grid = f1.grid();
    let mut max: f64 = 0.0;
    Zip::indexed(f1.coeffs())
        .and(f2.coeffs())
        .and(f3.coeffs())
        .for_each(|idx, &c1, &c2, &c3| {
            let (k1, k2, x3) = grid.wavenumber(idx);
            let div = Complex64::new(0.0, k1) * c1
                + Complex64::new(0.0, k2) * c2
                + Complex64::new(0.0, x3) * c3;
            let n = div.norm();
            if n > max {
                max = n;
            }
        });
    max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;

    fn test_grid() -> Grid {
        Grid::new(8, 16, 4.0).unwrap()
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let grid = test_grid();
        let f = SpectralField::from_physical(&grid, |_, _, _| 3.0);
        let d = derivative(&f, Axis3::X3, 1);
        assert!(d.max_coeff_modulus() < 1e-14);
    }

    #[test]
    fn derivative_of_cos_is_minus_sin() {
        let grid = test_grid();
        let f = SpectralField::from_physical(&grid, |x1, _, _| x1.cos());
        let d = derivative(&f, Axis3::X1, 1);
        let phys = d.to_physical().unwrap();
        for (idx, v) in phys.indexed_iter() {
            let (x1, _, _) = grid.point(idx);
            assert!((v + x1.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn second_vertical_derivative_scales_single_mode() {
        let grid = test_grid();
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(0, 0, 3, Complex64::new(0.5, 0.25));
        let d = derivative(&f, Axis3::X3, 2);
        let xi = grid.xi3(3);
        let expect = Complex64::new(0.5, 0.25) * (-xi * xi);
        assert!((d.coeff(0, 0, 3) - expect).norm() < 1e-14);
    }

    #[test]
    fn horizontal_average_is_projector_and_complement_reconstructs() {
        let grid = test_grid();
        let f = SpectralField::from_physical(&grid, |x1, x2, x3| {
            x1.cos() * (0.3 * x3).sin() + (0.7 * x3).cos() + x2.sin()
        });
        let mf = horizontal_average(&f);
        let mmf = horizontal_average(&mf);
        assert!(mf.subtracted(&mmf).unwrap().max_coeff_modulus() < 1e-15);
        let sum = mf.added(&m_perp(&f)).unwrap();
        assert!(sum.subtracted(&f).unwrap().max_coeff_modulus() < 1e-15);
    }

    #[test]
    fn average_of_purely_vertical_field_is_identity() {
        let grid = test_grid();
        let f = SpectralField::from_physical(&grid, |_, _, x3| (0.5 * x3).cos());
        let mf = horizontal_average(&f);
        assert!(mf.subtracted(&f).unwrap().max_coeff_modulus() < 1e-14);
        let g = SpectralField::from_physical(&grid, |x1, _, x3| x1.cos() * (0.5 * x3).cos());
        assert!(horizontal_average(&g).max_coeff_modulus() < 1e-14);
    }

    #[test]
    fn dealias_keeps_two_thirds_per_axis() {
        let grid = test_grid();
        let full = SpectralField::from_coeffs(
            &grid,
            ndarray::Array3::from_elem(grid.shape(), Complex64::new(1.0, 0.0)),
        )
        .unwrap();
        let cut = dealias(&full);
        let survivors = cut.coeffs().iter().filter(|c| c.norm() > 0.0).count();
        let per_h = 2 * Grid::dealias_cutoff(8) + 1; // -2..=2
        let per_v = 2 * Grid::dealias_cutoff(16) + 1; // -5..=5
        assert_eq!(survivors as i64, per_h * per_h * per_v);
        let twice = dealias(&cut);
        assert_eq!(twice, cut);
    }

    #[test]
    fn friedrichs_is_identity_above_grid_radius_and_cuts_single_modes() {
        let grid = test_grid();
        let f = SpectralField::from_physical(&grid, |x1, x2, x3| {
            (x1 + x2).cos() + (0.25 * x3).sin()
        });
        let huge = friedrichs_project(&f, 1e6, 1.0);
        assert!(huge.subtracted(&f).unwrap().max_coeff_modulus() < 1e-15);

        let mut single = SpectralField::zeros(&grid);
        single.set_mode(3, 0, 0, Complex64::new(1.0, 0.0));
        let cut = friedrichs_project(&single, 2.0, 1.0);
        assert!(cut.max_coeff_modulus() == 0.0);
    }

    #[test]
    fn friedrichs_anisotropic_predicate_matches_exhaustive_check() {
        let grid = test_grid();
        let eps = 0.1;
        let n = 0.3;
        let full = SpectralField::from_coeffs(
            &grid,
            ndarray::Array3::from_elem(grid.shape(), Complex64::new(1.0, 0.0)),
        )
        .unwrap();
        let cut = friedrichs_project(&full, n, eps);
        let sym = AnisotropicSymbol::new(eps);
        for (idx, c) in cut.coeffs().indexed_iter() {
            let (k1, k2, x3) = grid.wavenumber(idx);
            let inside = sym.xi_eps_sq(k1, k2, x3) <= n * n;
            assert_eq!(c.norm() > 0.0, inside, "mode {:?}", idx);
        }
        // On the vertical column the predicate reduces to eps*|xi3| <= n.
        assert!(cut.coeff(0, 0, 2).norm() > 0.0); // eps*xi3 = 0.1*pi/2 ~ 0.157
        assert!(cut.coeff(0, 0, 4).norm() == 0.0); // eps*xi3 = 0.1*pi ~ 0.314
    }

    #[test]
    fn friedrichs_commutes_with_derivative_and_average() {
        let grid = test_grid();
        let f = SpectralField::from_physical(&grid, |x1, x2, x3| {
            (2.0 * x1).cos() * x2.sin() + (0.5 * x3).cos()
        });
        let a = derivative(&friedrichs_project(&f, 2.5, 0.4), Axis3::X1, 1);
        let b = friedrichs_project(&derivative(&f, Axis3::X1, 1), 2.5, 0.4);
        assert!(a.subtracted(&b).unwrap().max_coeff_modulus() < 1e-14);
        let c = horizontal_average(&friedrichs_project(&f, 2.5, 0.4));
        let d = friedrichs_project(&horizontal_average(&f), 2.5, 0.4);
        assert!(c.subtracted(&d).unwrap().max_coeff_modulus() < 1e-14);
    }

    #[test]
    fn plus_modulus_takes_moduli() {
        let grid = test_grid();
        let mut f = SpectralField::zeros(&grid);
        f.set_coeff(1, 2, 3, Complex64::new(-3.0, 4.0));
        let p = plus_modulus(&f);
        assert_eq!(p.coeff(1, 2, 3), Complex64::new(5.0, 0.0));
        let q = plus_modulus(&p);
        assert_eq!(q.coeff(1, 2, 3), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn pseudo_spectral_product_matches_dense_convolution() {
        let grid = Grid::new(8, 8, 2.0).unwrap();
        let mut rng_state = 88u64;
        let mut next = || {
            // Tiny xorshift for reproducible coefficients in-test.
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state % 1000) as f64 / 1000.0 - 0.5
        };
        let mut a = SpectralField::zeros(&grid);
        let mut b = SpectralField::zeros(&grid);
        for k1 in -2i64..=2 {
            for k2 in -2i64..=2 {
                for m in -2i64..=2 {
                    a.set_mode(k1, k2, m, Complex64::new(next(), next()));
                    b.set_mode(k1, k2, m, Complex64::new(next(), next()));
                }
            }
        }
        let a = dealias(&a);
        let b = dealias(&b);
        let fast = dealiased_product(&a, &b).unwrap();
        let dense = dealias(&dense_convolution(&a, &b).unwrap());
        let diff = fast.subtracted(&dense).unwrap().max_coeff_modulus();
        let scale = dense.max_coeff_modulus();
        assert!(diff <= 1e-12 * scale.max(1.0), "diff {diff}, scale {scale}");
    }
}
