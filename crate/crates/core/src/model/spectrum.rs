//! 1D periodic spectral carrier for the scalar model equation (unit circle,
//! integer wavenumbers).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

fn plan_1d(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Fourier coefficients of a real scalar function on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1 {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum1 {
    pub fn zeros(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 8);
        Spectrum1 {
            n,
            coeffs: vec![Complex64::ZERO; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Sample a real function on the uniform grid and transform.
    pub fn from_physical<F: Fn(f64) -> f64>(n: usize, f: F) -> Self {
        let mut data: Vec<Complex64> = (0..n)
            .map(|i| {
                let x = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Complex64::new(f(x), 0.0)
            })
            .collect();
        let fft = plan_1d(n, true);
        fft.process(&mut data);
        let scale = 1.0 / n as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
        Spectrum1 { n, coeffs: data }
    }

    pub fn set_mode(&mut self, k: i64, value: Complex64) {
        let n = self.n as i64;
        let i = k.rem_euclid(n) as usize;
        let j = (-k).rem_euclid(n) as usize;
        if i == j {
            self.coeffs[i] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[i] = value;
            self.coeffs[j] = value.conj();
        }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs[k.rem_euclid(self.n as i64) as usize]
    }

    pub fn to_physical(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        let fft = plan_1d(self.n, false);
        fft.process(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Physical product `self * other`, dealiased by the 2/3 rule.
    pub fn dealiased_square(&self) -> Self {
        let mut phys: Vec<Complex64> = {
            let mut data = self.coeffs.clone();
            plan_1d(self.n, false).process(&mut data);
            data
        };
        for c in phys.iter_mut() {
            let re = c.re;
            *c = Complex64::new(re * re, 0.0);
        }
        plan_1d(self.n, true).process(&mut phys);
        let scale = 1.0 / self.n as f64;
        let cutoff = self.dealias_cutoff();
        let mut out = Spectrum1 {
            n: self.n,
            coeffs: phys,
        };
        for i in 0..out.n {
            let k = out.signed(i);
            if k.abs() > cutoff {
                out.coeffs[i] = Complex64::ZERO;
            } else {
                out.coeffs[i] *= scale;
            }
        }
        out
    }

    pub fn dealias_in_place(&mut self) {
        let cutoff = self.dealias_cutoff();
        for i in 0..self.n {
            if self.signed(i).abs() > cutoff {
                self.coeffs[i] = Complex64::ZERO;
            }
        }
    }

    /// `sum_xi |u_hat(xi)|`, the discrete `F(L^1)` norm.
    pub fn fl1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// `sum_xi e^{b |xi|} |u_hat(xi)|`, failing when the exponent would
    /// overflow (the requested bandwidth exceeds the representable range).
    pub fn weighted_fl1(&self, b: f64) -> Result<f64> {
        let max_exp = b * self.n as f64 / 2.0;
        if max_exp > crate::besov::MAX_WEIGHT_EXPONENT {
            return Err(Error::WeightOverflow {
                max_exponent: max_exp,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (b * self.signed(i).abs() as f64).exp() * c.norm())
            .sum())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Spectrum1 {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_modulus(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_modes() {
        let u = Spectrum1::from_physical(64, |x| x.cos() + 0.5 * (3.0 * x).sin());
        assert!((u.coeff(1).re - 0.5).abs() < 1e-13);
        assert!((u.coeff(3).im + 0.25).abs() < 1e-13);
        let phys = u.to_physical();
        let x0 = 0.0f64;
        assert!((phys[0] - (x0.cos() + 0.5 * (3.0 * x0).sin())).abs() < 1e-12);
    }

    #[test]
    fn square_matches_trig_identity() {
        // (cos x)^2 = 1/2 + cos(2x)/2.
        let u = Spectrum1::from_physical(64, |x| x.cos());
        let sq = u.dealiased_square();
        assert!((sq.coeff(0).re - 0.5).abs() < 1e-13);
        assert!((sq.coeff(2).re - 0.25).abs() < 1e-13);
        assert!((sq.coeff(-2).re - 0.25).abs() < 1e-13);
        assert!(sq.fl1() - 1.0 < 1e-12);
    }

    #[test]
    fn weighted_norm_and_overflow() {
        let mut u = Spectrum1::zeros(64);
        u.set_mode(5, Complex64::new(0.3, 0.4)); // modulus 0.5 each side
        let x = u.weighted_fl1(0.2).unwrap();
        let expect = 2.0 * 0.5 * (0.2f64 * 5.0).exp();
        assert!((x - expect).abs() < 1e-12 * expect);
        assert!(u.weighted_fl1(30.0).is_err());
    }
}
