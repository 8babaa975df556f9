//! Seed-pinned random fields for invariant checks and fitted-constant
//! corpora.

use ndarray::Array3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::ops::dealias_in_place;
use crate::spectral::{m_perp, Grid, SpectralField};

/// Random real field with spectrum shaped like `(1 + |xi|^2)^{-p/2}`,
/// dealiased, with `max` coefficient modulus scaled to `amplitude`.
pub fn random_field(grid: &Grid, seed: u64, amplitude: f64, decay_p: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = Array3::from_shape_fn(grid.shape(), |_| rng.random::<f64>() * 2.0 - 1.0);
    let mut f = SpectralField::from_samples(grid, &samples).expect("shape matches");
    f.multiply_in_place(|k1, k2, x3| {
        let r_sq = k1 * k1 + k2 * k2 + x3 * x3;
        Complex64::new((1.0 + r_sq).powf(-decay_p / 2.0), 0.0)
    });
    dealias_in_place(&mut f);
    let max = f.max_coeff_modulus();
    if max > 0.0 {
        f = f.scaled(amplitude / max);
    }
    f
}

/// Random divergence-free velocity field in rescaled variables: Leray
/// projection under the plain metric, with the horizontal average of the
/// vertical component removed so that `M v^3 = 0`.
pub fn random_divergence_free(
    grid: &Grid,
    seed: u64,
    amplitude: f64,
    decay_p: f64,
) -> [SpectralField; 3] {
    let raw = [
        random_field(grid, seed, 1.0, decay_p),
        random_field(grid, seed.wrapping_add(1), 1.0, decay_p),
        random_field(grid, seed.wrapping_add(2), 1.0, decay_p),
    ];
    let mut out = [
        SpectralField::zeros(grid),
        SpectralField::zeros(grid),
        SpectralField::zeros(grid),
    ];
    let shape = grid.shape();
    for i in 0..shape.0 {
        for j in 0..shape.1 {
            for k in 0..shape.2 {
                let (k1, k2, x3) = grid.wavenumber((i, j, k));
                let xi = [k1, k2, x3];
                let r_sq = k1 * k1 + k2 * k2 + x3 * x3;
                let v = [
                    raw[0].coeffs()[(i, j, k)],
                    raw[1].coeffs()[(i, j, k)],
                    raw[2].coeffs()[(i, j, k)],
                ];
                if r_sq == 0.0 {
                    continue; // no mean flow
                }
                let dot = v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2];
                for c in 0..3 {
                    out[c].coeffs_mut()[(i, j, k)] = v[c] - dot * xi[c] / r_sq;
                }
            }
        }
    }
    // Divergence-free forces xi3 * v3 = 0 on the xi_h = 0 column already;
    // remove any rounding there and the xi = 0 slot explicitly.
    let v3 = m_perp(&out[2]);
    out[2] = v3;
    let max = out
        .iter()
        .map(|f| f.max_coeff_modulus())
        .fold(0.0, f64::max);
    if max > 0.0 {
        for f in out.iter_mut() {
            *f = f.scaled(amplitude / max);
        }
    }
    out
}
