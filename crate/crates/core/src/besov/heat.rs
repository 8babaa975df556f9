//! The heat-semigroup norm `sup_{t>0} t^{1/2} ||e^{tD}f||_{L^inf}`, the
//! largest scaling-invariant norm, estimated on a log-spaced time grid.

use ndarray::Zip;
use rayon::prelude::*;

use crate::error::Result;
use crate::spectral::{transform, Grid, SpectralField};

use super::weights::SeparableWeight;

/// Time-grid design for the supremum: log-spaced samples covering
/// `[t_min, t_min * 10^decades]` with `t_min` safely below the inverse
/// squared Nyquist radius.
#[derive(Debug, Clone, Copy)]
pub struct HeatNormConfig {
    pub samples_per_decade: usize,
    pub decades: usize,
}

impl Default for HeatNormConfig {
    fn default() -> Self {
        HeatNormConfig {
            samples_per_decade: 64,
            decades: 6,
        }
    }
}

impl HeatNormConfig {
    pub fn times(&self, grid: &Grid) -> Vec<f64> {
        let ch = grid.n_h() as f64 / 2.0;
        let cv = grid.xi3(grid.n_v() / 2).abs();
        let kappa_sq = 2.0 * ch * ch + cv * cv;
        let t_min = 0.1 / kappa_sq;
        let n = self.samples_per_decade * self.decades;
        let t_max = t_min * 10f64.powi(self.decades as i32);
        assert!(t_max > 1.0, "heat-norm time grid must extend beyond t = 1");
        (0..=n)
            .map(|i| t_min * 10f64.powf(i as f64 / self.samples_per_decade as f64))
            .collect()
    }
}

/// `sup_t t^{1/2} ||e^{tD} f||_{L^inf}` for a vector field given by its
/// components; the pointwise magnitude is the Euclidean norm across
/// components. Scalars are the one-component case.
pub fn hminus1_inf_norm(components: &[&SpectralField], cfg: &HeatNormConfig) -> Result<f64> {
    assert!(!components.is_empty());
    let grid = components[0].grid().clone();
    let times = cfg.times(&grid);
    let best = times
        .par_iter()
        .map(|&t| {
            let kernel = SeparableWeight::heat(&grid, t).expect("heat exponent is nonpositive");
            let mut mag_sq = ndarray::Array3::<f64>::zeros(grid.shape());
            let mut pending: Option<SpectralField> = None;
            for (i, f) in components.iter().enumerate() {
                let smoothed = kernel.apply(f);
                if i + 1 < components.len() && pending.is_none() {
                    pending = Some(smoothed);
                    continue;
                }
                match pending.take() {
                    Some(first) => {
                        let (pa, pb) =
                            transform::inverse_pair(&grid, first.coeffs(), smoothed.coeffs());
                        Zip::from(&mut mag_sq).and(&pa).and(&pb).for_each(|m, &a, &b| {
                            *m += a * a + b * b;
                        });
                    }
                    None => {
                        let phys = smoothed.to_physical_complex();
                        Zip::from(&mut mag_sq).and(&phys).for_each(|m, &c| {
                            *m += c.norm_sqr();
                        });
                    }
                }
            }
            let sup = mag_sq.iter().fold(0.0f64, |acc, &v| acc.max(v)).sqrt();
            t.sqrt() * sup
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Convenience wrapper for a scalar field.
pub fn hminus1_inf_norm_scalar(f: &SpectralField, cfg: &HeatNormConfig) -> Result<f64> {
    hminus1_inf_norm(&[f], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_field_measures_zero() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = SpectralField::zeros(&grid);
        assert_eq!(
            hminus1_inf_norm_scalar(&f, &HeatNormConfig::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_mode_matches_the_calculus_maximum() {
        // For f = A cos(k.x) with |k| = kappa the maximand is
        // A t^{1/2} e^{-t kappa^2}, maximised at t = 1/(2 kappa^2) with value
        // A (2 e kappa^2)^{-1/2}.
        let grid = Grid::new(16, 16, 4.0).unwrap();
        for (k1, m, amp) in [(1i64, 0i64, 2.0), (3, 4, 0.7)] {
            let mut f = SpectralField::zeros(&grid);
            f.set_mode(k1, 0, m, Complex64::new(amp / 2.0, 0.0));
            let kappa_sq = (k1 * k1) as f64 + grid.xi3(m as usize) * grid.xi3(m as usize);
            let expect = amp / (2.0 * std::f64::consts::E * kappa_sq).sqrt();
            let got = hminus1_inf_norm_scalar(&f, &HeatNormConfig::default()).unwrap();
            let rel = (got - expect).abs() / expect;
            assert!(rel < 2e-3, "relative error {rel} for mode ({k1},{m})");
            assert!(got <= expect * (1.0 + 1e-12), "sampled sup cannot exceed the true sup");
        }
    }

    #[test]
    fn doubling_the_sampling_changes_little() {
        let grid = Grid::new(16, 16, 4.0).unwrap();
        let f = SpectralField::from_physical(&grid, |x1, x2, x3| {
            (2.0 * x1).cos() * x2.sin() + 0.5 * (0.5 * x3).cos()
        });
        let coarse = hminus1_inf_norm_scalar(&f, &HeatNormConfig::default()).unwrap();
        let fine = hminus1_inf_norm_scalar(
            &f,
            &HeatNormConfig {
                samples_per_decade: 128,
                decades: 6,
            },
        )
        .unwrap();
        assert!((fine - coarse).abs() / fine < 0.01);
    }
}
