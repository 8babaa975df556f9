//! The rescaled pressure: `Delta_eps q = -sum_{j,k} d_j d_k (v^j v^k)` with
//! plain vertical derivatives in the source and the anisotropic Laplacian on
//! the left, solved mode-wise away from the horizontal average. Two
//! independent decompositions of the same pressure serve as cross-check
//! evaluators.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::ops::dealias_in_place;
use crate::spectral::{m_perp, transform, AnisotropicSymbol, Grid, SpectralField};

use super::state::VelocityState;

/// The six dealiased quadratic products `v^j v^k`, upper triangle in the
/// order (11, 12, 13, 22, 23, 33), plus the physical sup of `|v|`.
pub struct ProductSet {
    pub q: [SpectralField; 6],
    pub sup_velocity: f64,
}

#[inline]
pub(crate) fn pair_index(j: usize, k: usize) -> usize {
    match (j.min(k), j.max(k)) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => unreachable!(),
    }
}

/// Precomputed retained-mode mask: the dealias box intersected with the
/// anisotropic ball `|xi_eps| <= n` when a radius is given.
pub struct ModeMask {
    keep: Vec<bool>,
}

impl ModeMask {
    pub fn new(grid: &Grid, friedrichs: Option<(f64, f64)>) -> Self {
        let (n1, n2, n3) = grid.shape();
        let kh = grid.k_h_table();
        let xv = grid.xi3_table();
        let ch = grid.dealias_cutoff_h() as f64;
        let cv = grid.dealias_cutoff_v() as f64 * grid.xi3_spacing();
        let mut keep = vec![false; grid.mode_count()];
        let mut idx = 0;
        for i in 0..n1 {
            for j in 0..n2 {
                let in_h = kh[i].abs() <= ch && kh[j].abs() <= ch;
                for k in 0..n3 {
                    let mut ok = in_h && xv[k].abs() <= cv + 1e-12;
                    if let Some((n, eps)) = friedrichs {
                        ok = ok
                            && kh[i] * kh[i] + kh[j] * kh[j] + eps * eps * xv[k] * xv[k]
                                <= n * n;
                    }
                    keep[idx] = ok;
                    idx += 1;
                }
            }
        }
        ModeMask { keep }
    }

    pub fn apply(&self, f: &mut SpectralField) {
        let slice = f.coeffs_mut().as_slice_mut().expect("standard layout");
        for (c, &k) in slice.iter_mut().zip(self.keep.iter()) {
            if !k {
                *c = Complex64::ZERO;
            }
        }
    }
}

impl ProductSet {
    /// Pseudo-spectral evaluation of all six products, dealiased via the 2/3
    /// rule and restricted to the anisotropic ball `|xi_eps| <= n` when a
    /// radius is given.
    pub fn compute(
        v: [&SpectralField; 3],
        friedrichs: Option<(f64, f64)>,
    ) -> Result<ProductSet> {
        let grid = v[0].grid().clone();
        let mask = ModeMask::new(&grid, friedrichs);
        Self::compute_with_mask(v, &grid, &mask)
    }

    /// As [`ProductSet::compute`] with a prebuilt mask (the solver hot path).
    pub fn compute_with_mask(
        v: [&SpectralField; 3],
        grid: &Grid,
        mask: &ModeMask,
    ) -> Result<ProductSet> {
        let (p1, p2) = transform::inverse_pair(grid, v[0].coeffs(), v[1].coeffs());
        let p3 = {
            let phys = transform::inverse(grid, v[2].coeffs());
            phys.mapv(|c| c.re)
        };
        let mut sup: f64 = 0.0;
        ndarray::Zip::from(&p1).and(&p2).and(&p3).for_each(|&a, &b, &c| {
            let m = a * a + b * b + c * c;
            if m > sup {
                sup = m;
            }
        });
        let sup_velocity = sup.sqrt();

        let (f11, f12) = transform::forward_pair(grid, &(&p1 * &p1), &(&p1 * &p2));
        let (f13, f22) = transform::forward_pair(grid, &(&p1 * &p3), &(&p2 * &p2));
        let (f23, f33) = transform::forward_pair(grid, &(&p2 * &p3), &(&p3 * &p3));

        let mut out = [f11, f12, f13, f22, f23, f33]
            .map(|c| SpectralField::from_coeffs(grid, c).expect("same grid"));
        for f in out.iter_mut() {
            mask.apply(f);
        }
        Ok(ProductSet {
            q: out,
            sup_velocity,
        })
    }
}

/// Solve for `M^perp q` given the product set. The `xi_h = 0` column is set
/// to zero: the mean pressure never enters the `(w, vbar)` system.
pub(crate) fn pressure_from_products(products: &ProductSet, grid: &Grid, eps: f64) -> SpectralField {
    let sym = AnisotropicSymbol::new(eps);
    let (n1, n2, n3) = grid.shape();
    let kh = grid.k_h_table();
    let xv = grid.xi3_table();
    let mut q = SpectralField::zeros(grid);
    let qs = [
        products.q[0].coeffs().as_slice().expect("layout"),
        products.q[1].coeffs().as_slice().expect("layout"),
        products.q[2].coeffs().as_slice().expect("layout"),
        products.q[3].coeffs().as_slice().expect("layout"),
        products.q[4].coeffs().as_slice().expect("layout"),
        products.q[5].coeffs().as_slice().expect("layout"),
    ];
    let out = q.coeffs_mut().as_slice_mut().expect("layout");
    for i in 0..n1 {
        let k1 = kh[i];
        for j in 0..n2 {
            let k2 = kh[j];
            if k1 == 0.0 && k2 == 0.0 {
                continue;
            }
            let base = (i * n2 + j) * n3;
            for k in 0..n3 {
                let x3 = xv[k];
                let f = base + k;
                // S = sum_{a,b} xi_a xi_b Q_ab with the upper triangle
                // doubled.
                let source = k1 * k1 * qs[0][f]
                    + 2.0 * k1 * k2 * qs[1][f]
                    + 2.0 * k1 * x3 * qs[2][f]
                    + k2 * k2 * qs[3][f]
                    + 2.0 * k2 * x3 * qs[4][f]
                    + x3 * x3 * qs[5][f];
                out[f] = -source / sym.xi_eps_sq(k1, k2, x3);
            }
        }
    }
    q
}

/// `M^perp q` for an assembled velocity (products computed internally with
/// plain dealiasing).
pub fn pressure_solve(v: [&SpectralField; 3], eps: f64) -> Result<SpectralField> {
    let products = ProductSet::compute(v, None)?;
    Ok(pressure_from_products(&products, v[0].grid(), eps))
}

/// `Delta_eps^{-1} Op f` on `M^perp` modes (zero elsewhere), with `Op`
/// given by its Fourier symbol: the result has coefficients
/// `op_symbol(xi) * f_hat(xi) / (-|xi_eps|^2)`.
fn apply_inv_delta_eps(
    f: &SpectralField,
    eps: f64,
    op_symbol: impl Fn(f64, f64, f64) -> Complex64 + Sync,
) -> SpectralField {
    let sym = AnisotropicSymbol::new(eps);
    f.multiplied(move |k1, k2, x3| {
        if k1 == 0.0 && k2 == 0.0 {
            Complex64::ZERO
        } else {
            op_symbol(k1, k2, x3) / Complex64::new(-sym.xi_eps_sq(k1, k2, x3), 0.0)
        }
    })
}

/// Residual of the split `eps q = q_1 - q_2` where
///
/// * `q_1` collects the quadratic terms whose multipliers are bounded
///   combinations of `grad_eps^2 Delta_eps^{-1}` acting on products carrying
///   an `eps` weight in every vertical slot,
/// * `q_2 = -2 eps d_3 Delta_eps^{-1} (w^3 div_h w^h)` carries the one
///   unweighted vertical derivative, tamed by the divergence-free relation.
///
/// Returns `max |M^perp(q_1 - q_2 - eps q)| / max |eps q|`.
pub fn lemma_split_residual(state: &VelocityState, eps: f64) -> Result<f64> {
    let grid = state.grid().clone();
    let v = [
        state.full_component(0),
        state.full_component(1),
        state.full_component(2),
    ];
    let products = ProductSet::compute([&v[0], &v[1], &v[2]], None)?;
    let q = pressure_from_products(&products, &grid, eps);

    // q_1 = Delta_eps^{-1}[-eps d_a d_b](Q_ab) + Delta_eps^{-1}[-2 eps d_a
    // d_3](Q_a3): symbols eps*xa*xb and 2*eps*xa*xi3.
    let mut q1 = SpectralField::zeros(&grid);
    for a in 0..2usize {
        for b in 0..2usize {
            let prod = &products.q[pair_index(a, b)];
            let term = apply_inv_delta_eps(prod, eps, move |k1, k2, _| {
                let xa = if a == 0 { k1 } else { k2 };
                let xb = if b == 0 { k1 } else { k2 };
                Complex64::new(eps * xa * xb, 0.0)
            });
            q1.add_assign_scaled(&term, 1.0);
        }
    }
    for a in 0..2usize {
        let prod = &products.q[pair_index(a, 2)];
        let term = apply_inv_delta_eps(prod, eps, move |k1, k2, x3| {
            let xa = if a == 0 { k1 } else { k2 };
            Complex64::new(2.0 * eps * xa * x3, 0.0)
        });
        q1.add_assign_scaled(&term, 1.0);
    }

    // q_2 = Delta_eps^{-1}[-2 eps d_3](w^3 div_h w^h): symbol -2 eps i xi3.
    let div_h = {
        let mut d = crate::spectral::derivative(&state.w_h[0], crate::spectral::Axis3::X1, 1);
        d.add_assign_scaled(
            &crate::spectral::derivative(&state.w_h[1], crate::spectral::Axis3::X2, 1),
            1.0,
        );
        d
    };
    let w3_divh = crate::spectral::dealiased_product(&state.w3, &div_h)?;
    let q2 = apply_inv_delta_eps(&w3_divh, eps, move |_, _, x3| {
        Complex64::new(0.0, -2.0 * eps * x3)
    });

    // eps q = q1 - q2 with the conventions above.
    let mut lhs = q1.clone();
    lhs.add_assign_scaled(&q2, -1.0);
    let eps_q = q.scaled(eps);
    let diff = m_perp(&lhs.subtracted(&eps_q)?).max_coeff_modulus();
    let scale = eps_q.max_coeff_modulus().max(1e-300);
    Ok(diff / scale)
}

/// Residual of the split `q = q_h(w^h) + q_3(v)`:
///
/// * `q_h = -Delta_eps^{-1} ((div_h w^h)^2 + sum_{k,l<=2} d_k w^l d_l w^k)`,
/// * `q_3 = -2 Delta_eps^{-1} (sum_l d_3 v^l d_l w^3)`,
///
/// compared against the direct solve on `M^perp` modes; the vertical
/// derivative of `(v^3)^2` has been converted through `d_3 v^3 = -div_h
/// w^h`. Returns `max |M^perp(q_h + q_3 - q)| / max |q|`.
pub fn component_split_residual(state: &VelocityState, eps: f64) -> Result<f64> {
    use crate::spectral::{dealiased_product, derivative, Axis3};
    let grid = state.grid().clone();
    let v = [
        state.full_component(0),
        state.full_component(1),
        state.full_component(2),
    ];
    let products = ProductSet::compute([&v[0], &v[1], &v[2]], None)?;
    let q = pressure_from_products(&products, &grid, eps);

    let dx = [Axis3::X1, Axis3::X2];
    // (div_h w^h)^2.
    let div_h = {
        let mut d = derivative(&state.w_h[0], Axis3::X1, 1);
        d.add_assign_scaled(&derivative(&state.w_h[1], Axis3::X2, 1), 1.0);
        d
    };
    let mut source = dealiased_product(&div_h, &div_h)?;
    // sum_{k,l} d_k w^l d_l w^k.
    for k in 0..2usize {
        for l in 0..2usize {
            let dk_wl = derivative(&state.w_h[l], dx[k], 1);
            let dl_wk = derivative(&state.w_h[k], dx[l], 1);
            source.add_assign_scaled(&dealiased_product(&dk_wl, &dl_wk)?, 1.0);
        }
    }
    // q_h = -Delta_eps^{-1} source: symbol -1.
    let q_h = apply_inv_delta_eps(&source, eps, |_, _, _| Complex64::new(-1.0, 0.0));

    let mut source3 = SpectralField::zeros(&grid);
    for l in 0..2usize {
        let d3_vl = derivative(&v[l], Axis3::X3, 1);
        let dl_w3 = derivative(&state.w3, dx[l], 1);
        source3.add_assign_scaled(&dealiased_product(&d3_vl, &dl_w3)?, 2.0);
    }
    let q_3 = apply_inv_delta_eps(&source3, eps, |_, _, _| Complex64::new(-1.0, 0.0));

    let sum = q_h.added(&q_3)?;
    let diff = m_perp(&sum.subtracted(&q)?).max_coeff_modulus();
    let scale = q.max_coeff_modulus().max(1e-300);
    Ok(diff / scale)
}
