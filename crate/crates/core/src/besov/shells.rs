//! Dyadic shells: the low ball and the annuli `2^j C`, under the exclusive
//! partition convention `2^j <= |xi| < 2^{j+1}` (ball: `|xi| < 1`), which
//! makes the shell restrictions sum back to the identity exactly.

use ndarray::Array3;

use crate::spectral::{Grid, SpectralField};

/// Index of the dyadic shell containing a wavenumber of modulus `r`.
/// Returns -1 for the low ball.
#[inline]
pub fn shell_index(r: f64) -> i32 {
    if r < 1.0 {
        -1
    } else {
        r.log2().floor() as i32
    }
}

/// One dyadic annulus (or the low ball for `j = -1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShellSpec {
    pub j: i32,
}

impl ShellSpec {
    pub fn new(j: i32) -> Self {
        assert!(j >= -1, "shell index must be >= -1");
        ShellSpec { j }
    }

    /// Exclusive membership of an isotropic wavenumber modulus.
    #[inline]
    pub fn contains(&self, r: f64) -> bool {
        shell_index(r) == self.j
    }

    /// Membership in the horizontal shell `2^k C_h` (low ball for `k = -1`),
    /// judged on `|xi_h|` alone.
    #[inline]
    pub fn contains_horizontal(&self, k1: f64, k2: f64) -> bool {
        shell_index((k1 * k1 + k2 * k2).sqrt()) == self.j
    }
}

/// Per-mode shell indices for a grid, plus the number of grid-supported
/// shells. Built once and reused by every norm evaluation.
#[derive(Debug, Clone)]
pub struct ShellMap {
    grid: Grid,
    table: Array3<i8>,
    n_shells: usize,
}

impl ShellMap {
    pub fn new(grid: &Grid) -> Self {
        let mut max_shell = -1i32;
        let table = Array3::from_shape_fn(grid.shape(), |idx| {
            let j = shell_index(grid.xi_modulus(idx));
            if j > max_shell {
                max_shell = j;
            }
            j as i8
        });
        ShellMap {
            grid: grid.clone(),
            table,
            n_shells: (max_shell + 2) as usize,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of grid-supported shells, counting the low ball.
    pub fn n_shells(&self) -> usize {
        self.n_shells
    }

    /// Shell index of the mode at a storage triple.
    #[inline]
    pub fn shell_of(&self, idx: (usize, usize, usize)) -> i32 {
        self.table[idx] as i32
    }

    /// Slot in a per-shell vector for shell `j` (ball occupies slot 0).
    #[inline]
    pub fn slot(j: i32) -> usize {
        (j + 1) as usize
    }

    /// Shell index stored in a per-shell vector slot.
    #[inline]
    pub fn shell_at_slot(slot: usize) -> i32 {
        slot as i32 - 1
    }

    pub fn table(&self) -> &Array3<i8> {
        &self.table
    }
}

/// Restriction of a field to shell `j`. Summing over all grid-supported
/// shells reconstructs the field exactly.
pub fn shell_restrict(f: &SpectralField, j: i32) -> SpectralField {
    let spec = ShellSpec::new(j);
    f.retain(move |k1, k2, x3| spec.contains((k1 * k1 + k2 * k2 + x3 * x3).sqrt()))
}
