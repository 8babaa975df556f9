use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Axis of the computational box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis3 {
    X1,
    X2,
    X3,
}

impl Axis3 {
    pub fn index(self) -> usize {
        match self {
            Axis3::X1 => 0,
            Axis3::X2 => 1,
            Axis3::X3 => 2,
        }
    }
}

/// Discrete Fourier grid on `T^2 x T_L`.
///
/// The horizontal directions are the unit torus (integer wavenumbers), the
/// vertical direction is the interval `[-L, L)` periodised, so vertical
/// wavenumbers are integer multiples of `pi / L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_h: usize,
    n_v: usize,
    l_vert: f64,
}

impl Grid {
    pub fn new(n_h: usize, n_v: usize, l_vert: f64) -> Result<Self> {
        if !n_h.is_power_of_two() || n_h < 4 {
            return Err(Error::InvalidConfig(format!(
                "horizontal mode count {n_h} must be a power of two >= 4"
            )));
        }
        if !n_v.is_power_of_two() || n_v < 4 {
            return Err(Error::InvalidConfig(format!(
                "vertical mode count {n_v} must be a power of two >= 4"
            )));
        }
        if !(l_vert > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "vertical half-period {l_vert} must be positive"
            )));
        }
        Ok(Grid { n_h, n_v, l_vert })
    }

    pub fn n_h(&self) -> usize {
        self.n_h
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn l_vert(&self) -> f64 {
        self.l_vert
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_h, self.n_h, self.n_v)
    }

    pub fn mode_count(&self) -> usize {
        self.n_h * self.n_h * self.n_v
    }

    /// Vertical wavenumber spacing `pi / L`.
    pub fn xi3_spacing(&self) -> f64 {
        PI / self.l_vert
    }

    /// Signed integer wavenumber for a storage index along an axis of length `n`.
    #[inline]
    pub fn signed_index(i: usize, n: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage index of the negated wavenumber along an axis of length `n`.
    #[inline]
    pub fn negated_index(i: usize, n: usize) -> usize {
        if i == 0 {
            0
        } else {
            n - i
        }
    }

    /// Horizontal wavenumber component for storage index `i`.
    #[inline]
    pub fn k_h(&self, i: usize) -> f64 {
        Self::signed_index(i, self.n_h) as f64
    }

    /// Vertical wavenumber for storage index `i`: `(pi / L) * m`.
    #[inline]
    pub fn xi3(&self, i: usize) -> f64 {
        Self::signed_index(i, self.n_v) as f64 * self.xi3_spacing()
    }

    /// Full wavenumber vector `(k1, k2, xi3)` for a storage triple.
    #[inline]
    pub fn wavenumber(&self, idx: (usize, usize, usize)) -> (f64, f64, f64) {
        (self.k_h(idx.0), self.k_h(idx.1), self.xi3(idx.2))
    }

    /// Euclidean modulus `|xi|` of the wavenumber at a storage triple.
    #[inline]
    pub fn xi_modulus(&self, idx: (usize, usize, usize)) -> f64 {
        let (k1, k2, x3) = self.wavenumber(idx);
        (k1 * k1 + k2 * k2 + x3 * x3).sqrt()
    }

    /// Largest retained integer index under the 2/3 dealiasing rule.
    #[inline]
    pub fn dealias_cutoff(n: usize) -> i64 {
        (n / 3) as i64
    }

    pub fn dealias_cutoff_h(&self) -> i64 {
        Self::dealias_cutoff(self.n_h)
    }

    pub fn dealias_cutoff_v(&self) -> i64 {
        Self::dealias_cutoff(self.n_v)
    }

    /// True when the storage triple survives the 2/3 rule.
    #[inline]
    pub fn in_dealias_box(&self, idx: (usize, usize, usize)) -> bool {
        let k1 = Self::signed_index(idx.0, self.n_h).abs();
        let k2 = Self::signed_index(idx.1, self.n_h).abs();
        let m = Self::signed_index(idx.2, self.n_v).abs();
        k1 <= self.dealias_cutoff_h() && k2 <= self.dealias_cutoff_h() && m <= self.dealias_cutoff_v()
    }

    /// Largest `|xi|` over the dealiased grid.
    pub fn max_dealiased_modulus(&self) -> f64 {
        let ch = self.dealias_cutoff_h() as f64;
        let cv = self.dealias_cutoff_v() as f64 * self.xi3_spacing();
        (2.0 * ch * ch + cv * cv).sqrt()
    }

    /// Largest `|xi_h|` over the dealiased grid.
    pub fn max_dealiased_horizontal(&self) -> f64 {
        let ch = self.dealias_cutoff_h() as f64;
        (2.0 * ch * ch).sqrt()
    }

    /// Per-index horizontal wavenumbers (length `n_h`).
    pub fn k_h_table(&self) -> Vec<f64> {
        (0..self.n_h).map(|i| self.k_h(i)).collect()
    }

    /// Per-index vertical wavenumbers (length `n_v`).
    pub fn xi3_table(&self) -> Vec<f64> {
        (0..self.n_v).map(|i| self.xi3(i)).collect()
    }

    /// Physical coordinates of the sample point at a storage triple.
    pub fn point(&self, idx: (usize, usize, usize)) -> (f64, f64, f64) {
        let h = 2.0 * PI / self.n_h as f64;
        let x3 = -self.l_vert + 2.0 * self.l_vert * idx.2 as f64 / self.n_v as f64;
        (idx.0 as f64 * h, idx.1 as f64 * h, x3)
    }
}
