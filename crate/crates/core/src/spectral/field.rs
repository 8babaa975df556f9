use ndarray::{Array3, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::grid::Grid;
use super::transform;

/// Imaginary residue (relative to the field scale) tolerated when casting a
/// synthesised field back to real samples.
pub const REALNESS_TOL: f64 = 1e-10;

/// Complex Fourier coefficients of a scalar function on `T^2 x T_L`.
///
/// This is the universal carrier of the laboratory. Coefficients are stored
/// in FFT layout, index `i` meaning wavenumber `i` for `i &lt;= n/2` and
/// `i - n` above.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array3<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: Array3::zeros(grid.shape()),
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Array3<Complex64>) -> Result<Self> {
        if coeffs.dim() != grid.shape() {
            return Err(Error::DimensionMismatch {
                expected: grid.shape(),
                got: coeffs.dim(),
            });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Forward transform of a real sample array.
    pub fn from_samples(grid: &Grid, samples: &Array3<f64>) -> Result<Self> {
        if samples.dim() != grid.shape() {
            return Err(Error::DimensionMismatch {
                expected: grid.shape(),
                got: samples.dim(),
            });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs: transform::forward(grid, samples),
        })
    }

    /// Sample a function of the physical coordinates and transform it.
    pub fn from_physical<F: Fn(f64, f64, f64) -> f64>(grid: &Grid, f: F) -> Self {
        let (n1, n2, n3) = grid.shape();
        let samples = Array3::from_shape_fn((n1, n2, n3), |idx| {
            let (x1, x2, x3) = grid.point(idx);
            f(x1, x2, x3)
        });
        SpectralField {
            grid: grid.clone(),
            coeffs: transform::forward(grid, &samples),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array3<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array3<Complex64> {
        self.coeffs
    }

    fn storage_index(&self, k1: i64, k2: i64, m: i64) -> (usize, usize, usize) {
        let n_h = self.grid.n_h() as i64;
        let n_v = self.grid.n_v() as i64;
        let wrap = |k: i64, n: i64| -> usize { k.rem_euclid(n) as usize };
        (wrap(k1, n_h), wrap(k2, n_h), wrap(m, n_v))
    }

    /// Coefficient at signed wavenumber indices `(k1, k2, m)`, the vertical
    /// wavenumber being `m * pi / L`.
    pub fn coeff(&self, k1: i64, k2: i64, m: i64) -> Complex64 {
        self.coeffs[self.storage_index(k1, k2, m)]
    }

    pub fn set_coeff(&mut self, k1: i64, k2: i64, m: i64, value: Complex64) {
        let idx = self.storage_index(k1, k2, m);
        self.coeffs[idx] = value;
    }

    /// Set the coefficient together with its Hermitian twin so the field
    /// stays real-valued in physical space. Self-conjugate slots (zero and
    /// Nyquist wavenumbers) keep only the real part of `value`.
    pub fn set_mode(&mut self, k1: i64, k2: i64, m: i64, value: Complex64) {
        let idx = self.storage_index(k1, k2, m);
        let twin = self.storage_index(-k1, -k2, -m);
        if idx == twin {
            self.coeffs[idx] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[idx] = value;
            self.coeffs[twin] = value.conj();
        }
    }

    /// Synthesis to physical samples, requiring the imaginary residue to be
    /// below [`REALNESS_TOL`] relative to the field scale.
    pub fn to_physical(&self) -> Result<Array3<f64>> {
        let phys = transform::inverse(&self.grid, &self.coeffs);
        let mut max_im: f64 = 0.0;
        let mut max_re: f64 = 0.0;
        for c in phys.iter() {
            max_im = max_im.max(c.im.abs());
            max_re = max_re.max(c.re.abs());
        }
        let limit = REALNESS_TOL * max_re.max(1.0);
        if max_im > limit {
            return Err(Error::NonRealField {
                max_imag: max_im,
                limit,
            });
        }
        Ok(phys.mapv(|c| c.re))
    }

    /// Synthesis to complex physical samples (no realness requirement).
    pub fn to_physical_complex(&self) -> Array3<Complex64> {
        transform::inverse(&self.grid, &self.coeffs)
    }

    /// Discrete `L^2` norm: by Plancherel this equals the root mean square of
    /// the physical samples.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest pointwise magnitude of the synthesised field.
    pub fn sup_norm(&self) -> f64 {
        self.to_physical_complex()
            .iter()
            .fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let (n1, n2, n3) = self.grid.shape();
        for i in 0..n1 {
            for j in 0..n2 {
                for k in 0..n3 {
                    let c = self.coeffs[(i, j, k)];
                    let t = self.coeffs[(
                        Grid::negated_index(i, n1),
                        Grid::negated_index(j, n2),
                        Grid::negated_index(k, n3),
                    )];
                    if (c - t.conj()).norm() > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Coefficient-wise multiplication by a function of the wavenumber.
    pub fn multiplied<F: Fn(f64, f64, f64) -> Complex64 + Sync>(&self, m: F) -> Self {
        let mut out = self.clone();
        out.multiply_in_place(m);
        out
    }

    pub fn multiply_in_place<F: Fn(f64, f64, f64) -> Complex64 + Sync>(&mut self, m: F) {
        let grid = self.grid.clone();
        Zip::indexed(&mut self.coeffs).for_each(|idx, c| {
            let (k1, k2, x3) = grid.wavenumber(idx);
            *c *= m(k1, k2, x3);
        });
    }

    /// Zero every coefficient for which the wavenumber predicate is false.
    pub fn retain<F: Fn(f64, f64, f64) -> bool + Sync>(&self, keep: F) -> Self {
        let mut out = self.clone();
        let grid = out.grid.clone();
        Zip::indexed(&mut out.coeffs).for_each(|idx, c| {
            let (k1, k2, x3) = grid.wavenumber(idx);
            if !keep(k1, k2, x3) {
                *c = Complex64::ZERO;
            }
        });
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.mapv(|c| c * s),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: f64) {
        Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|a, &b| *a += b * s);
    }

    pub fn added(&self, other: &Self) -> Result<Self> {
        same_grid(self, other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, 1.0);
        Ok(out)
    }

    pub fn subtracted(&self, other: &Self) -> Result<Self> {
        same_grid(self, other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, -1.0);
        Ok(out)
    }
}

pub fn same_grid(a: &SpectralField, b: &SpectralField) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}
