//! Exponential Fourier multipliers `e^{Psi(xi)}` for the analytic weights
//! `e^{a|D_3|}`, the bootstrap phase `e^{Phi(t,D)}` and heat kernels.
//!
//! All weights used here are separable as a function of `|xi_h|` times a
//! function of `|xi_3|`, so they are precomputed as a horizontal table and a
//! vertical table; applying one costs two multiplications per mode.

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Exponent magnitude beyond which `exp` would overflow into `inf`.
pub const MAX_WEIGHT_EXPONENT: f64 = 700.0;

/// A multiplier `w(xi) = h(|xi_h|) * v(|xi_3|)` tabulated on a grid.
#[derive(Debug, Clone)]
pub struct SeparableWeight {
    grid: Grid,
    h: Array2<f64>,
    v: Vec<f64>,
}

impl SeparableWeight {
    /// Build from exponent functions: the weight is
    /// `exp(h_exp(|xi_h|)) * exp(v_exp(|xi_3|))`.
    pub(crate) fn from_exponent_parts(
        grid: &Grid,
        h_exp: impl Fn(f64) -> f64,
        v_exp: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let n_h = grid.n_h();
        let n_v = grid.n_v();
        let mut max_exp = f64::NEG_INFINITY;
        let h = Array2::from_shape_fn((n_h, n_h), |(i, j)| {
            let k1 = grid.k_h(i);
            let k2 = grid.k_h(j);
            let e = h_exp((k1 * k1 + k2 * k2).sqrt());
            if e > max_exp {
                max_exp = e;
            }
            e
        });
        let mut max_v = f64::NEG_INFINITY;
        let v: Vec<f64> = (0..n_v)
            .map(|i| {
                let e = v_exp(grid.xi3(i).abs());
                if e > max_v {
                    max_v = e;
                }
                e
            })
            .collect();
        if max_exp + max_v > MAX_WEIGHT_EXPONENT {
            return Err(Error::WeightOverflow {
                max_exponent: max_exp + max_v,
            });
        }
        Ok(SeparableWeight {
            grid: grid.clone(),
            h: h.mapv(f64::exp),
            v: v.into_iter().map(f64::exp).collect(),
        })
    }

    /// The analytic vertical weight `e^{b |xi_3|}` (inverse for negative `b`).
    pub fn vertical_exp(grid: &Grid, b: f64) -> Result<Self> {
        Self::from_exponent_parts(grid, |_| 0.0, |x3| b * x3)
    }

    /// The phase weight `e^{sqrt(t)|xi_h| + c|xi_3|}`.
    pub fn phase(grid: &Grid, t: f64, c: f64) -> Result<Self> {
        let st = t.sqrt();
        Self::from_exponent_parts(grid, move |kh| st * kh, move |x3| c * x3)
    }

    /// Isotropic heat kernel `e^{-t |xi|^2}`.
    pub fn heat(grid: &Grid, t: f64) -> Result<Self> {
        Self::from_exponent_parts(grid, move |kh| -t * kh * kh, move |x3| -t * x3 * x3)
    }

    /// Anisotropic heat kernel `e^{-t (|xi_h|^2 + eps^2 xi_3^2)}`.
    pub fn heat_anisotropic(grid: &Grid, t: f64, eps: f64) -> Result<Self> {
        Self::from_exponent_parts(
            grid,
            move |kh| -t * kh * kh,
            move |x3| -t * eps * eps * x3 * x3,
        )
    }

    #[inline]
    pub fn factor(&self, idx: (usize, usize, usize)) -> f64 {
        self.h[(idx.0, idx.1)] * self.v[idx.2]
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Coefficient-wise multiplication by the weight.
    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let mut out = f.clone();
        self.apply_in_place(&mut out);
        out
    }

    pub fn apply_in_place(&self, f: &mut SpectralField) {
        debug_assert_eq!(f.grid(), &self.grid);
        let h = &self.h;
        let v = &self.v;
        Zip::indexed(f.coeffs_mut()).for_each(|idx, c| {
            *c *= h[(idx.0, idx.1)] * v[idx.2];
        });
    }
}

/// Coefficient-wise multiplication by `e^{w(xi)}` for an arbitrary exponent
/// function; errors if the exponent exceeds the representable range.
pub fn apply_weight(
    f: &SpectralField,
    w: impl Fn(f64, f64, f64) -> f64 + Sync,
) -> Result<SpectralField> {
    let grid = f.grid().clone();
    let mut max_exp = f64::NEG_INFINITY;
    for i in 0..grid.n_h() {
        for j in 0..grid.n_h() {
            for k in 0..grid.n_v() {
                let (k1, k2, x3) = grid.wavenumber((i, j, k));
                let e = w(k1, k2, x3);
                if e > max_exp {
                    max_exp = e;
                }
            }
        }
    }
    if max_exp > MAX_WEIGHT_EXPONENT {
        return Err(Error::WeightOverflow {
            max_exponent: max_exp,
        });
    }
    Ok(f.multiplied(|k1, k2, x3| num_complex::Complex64::new(w(k1, k2, x3).exp(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples =
            ndarray::Array3::from_shape_fn(grid.shape(), |_| rng.random::<f64>() * 2.0 - 1.0);
        SpectralField::from_samples(grid, &samples).unwrap()
    }

    #[test]
    fn zero_weight_is_identity() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 1);
        let g = apply_weight(&f, |_, _, _| 0.0).unwrap();
        assert!(g.subtracted(&f).unwrap().max_coeff_modulus() < 1e-15);
    }

    #[test]
    fn weight_followed_by_its_negation_roundtrips() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 2);
        let w = |k1: f64, k2: f64, x3: f64| 0.3 * (k1 * k1 + k2 * k2).sqrt() + 0.8 * x3.abs();
        let g = apply_weight(&f, w).unwrap();
        let back = apply_weight(&g, |k1, k2, x3| -w(k1, k2, x3)).unwrap();
        let rel = back.subtracted(&f).unwrap().max_coeff_modulus() / f.max_coeff_modulus();
        assert!(rel < 1e-12);
    }

    #[test]
    fn vertical_weight_scales_single_vertical_mode() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(0, 0, 3, Complex64::new(1.0, 0.0));
        let a = 1.3;
        let w = SeparableWeight::vertical_exp(&grid, a).unwrap();
        let g = w.apply(&f);
        let expect = (a * grid.xi3(3)).exp();
        assert!((g.coeff(0, 0, 3).re - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn overflow_is_reported() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 3);
        assert!(matches!(
            apply_weight(&f, |k1, _, _| 1e3 * k1.abs()),
            Err(Error::WeightOverflow { .. })
        ));
        assert!(matches!(
            SeparableWeight::vertical_exp(&grid, 120.0), // 120 * 2pi > 700
            Err(Error::WeightOverflow { .. })
        ));
    }

    #[test]
    fn separable_phase_matches_direct_weight() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 4);
        let (t, c) = (0.7, 0.4);
        let fast = SeparableWeight::phase(&grid, t, c).unwrap().apply(&f);
        let direct = apply_weight(&f, |k1, k2, x3| {
            t.sqrt() * (k1 * k1 + k2 * k2).sqrt() + c * x3.abs()
        })
        .unwrap();
        let rel = fast.subtracted(&direct).unwrap().max_coeff_modulus()
            / direct.max_coeff_modulus();
        assert!(rel < 1e-13);
    }
}
