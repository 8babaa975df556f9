//! The `B^s` norm (dyadic-shell `l^1`), its `H^s` companion (`l^2`), the
//! coefficient-`l^1` norm, and the running `L~^inf_T(B^s)` accumulator.

use std::io::Write;

use crate::error::Result;
use crate::spectral::SpectralField;

use super::shells::ShellMap;
use super::weights::SeparableWeight;

/// Per-shell `L^2` seminorms of a field (slot 0 is the low ball).
pub fn shell_l2_profile(map: &ShellMap, f: &SpectralField) -> Vec<f64> {
    let mut acc = vec![0.0; map.n_shells()];
    let table = map.table();
    for (c, &j) in f.coeffs().iter().zip(table.iter()) {
        acc[(j + 1) as usize] += c.norm_sqr();
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// Per-shell `L^2` seminorms of a weighted field, without materialising it.
pub fn shell_l2_profile_weighted(
    map: &ShellMap,
    f: &SpectralField,
    w: &SeparableWeight,
) -> Vec<f64> {
    let mut acc = vec![0.0; map.n_shells()];
    let table = map.table();
    for ((idx, c), &j) in f.coeffs().indexed_iter().zip(table.iter()) {
        let a = c.norm_sqr() * w.factor(idx) * w.factor(idx);
        acc[(j + 1) as usize] += a;
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// Per-shell `L^2` seminorms of a vector field (components combined in
/// quadrature), each component weighted by `w` when given.
pub fn vector_shell_l2_profile(
    map: &ShellMap,
    components: &[&SpectralField],
    w: Option<&SeparableWeight>,
) -> Vec<f64> {
    let mut acc = vec![0.0; map.n_shells()];
    let table = map.table();
    for f in components {
        match w {
            None => {
                for (c, &j) in f.coeffs().iter().zip(table.iter()) {
                    acc[(j + 1) as usize] += c.norm_sqr();
                }
            }
            Some(w) => {
                for ((idx, c), &j) in f.coeffs().indexed_iter().zip(table.iter()) {
                    let fac = w.factor(idx);
                    acc[(j + 1) as usize] += c.norm_sqr() * fac * fac;
                }
            }
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// Combine a per-shell profile into the `B^s` norm `sum_j 2^{js} ||.||_j`.
pub fn besov_from_profile(profile: &[f64], s: f64) -> f64 {
    profile
        .iter()
        .enumerate()
        .map(|(slot, &v)| (ShellMap::shell_at_slot(slot) as f64 * s).exp2() * v)
        .sum()
}

/// Combine a per-shell profile into the `H^s` comparison norm (`l^2` sum).
pub fn hs_from_profile(profile: &[f64], s: f64) -> f64 {
    profile
        .iter()
        .enumerate()
        .map(|(slot, &v)| {
            let w = (ShellMap::shell_at_slot(slot) as f64 * s).exp2() * v;
            w * w
        })
        .sum::<f64>()
        .sqrt()
}

/// `||f||_{B^s}` (builds a fresh shell map; use [`ShellMap`] directly in
/// loops).
pub fn besov_norm(f: &SpectralField, s: f64) -> f64 {
    let map = ShellMap::new(f.grid());
    besov_from_profile(&shell_l2_profile(&map, f), s)
}

/// `H^s` norm via the `l^2` combination of the same shell seminorms.
pub fn hs_norm(f: &SpectralField, s: f64) -> f64 {
    let map = ShellMap::new(f.grid());
    hs_from_profile(&shell_l2_profile(&map, f), s)
}

/// Coefficient-`l^1` norm, the discrete realisation of the `F(L^1)` norm
/// (pure coefficient sum; lattice weights are absorbed into fitted
/// constants).
pub fn fl1_norm(f: &SpectralField) -> f64 {
    f.coeffs().iter().map(|c| c.norm()).sum()
}

/// Ratio `||f||_{F(L^1)} / ||f||_{B^{3/2}}`, logged per grid as the
/// empirical embedding constant of `B^{3/2}` into `F(L^1)`.
pub fn fl1_embedding_ratio(f: &SpectralField) -> f64 {
    let b = besov_norm(f, 1.5);
    if b == 0.0 {
        0.0
    } else {
        fl1_norm(f) / b
    }
}

/// Running record of per-shell weighted seminorms and their suprema over
/// the sampled times: the `L~^inf_T(B^s)` accumulator.
#[derive(Debug, Clone)]
pub struct NormSeries {
    s: f64,
    current: Vec<f64>,
    running_max: Vec<f64>,
}

impl NormSeries {
    pub fn new(s: f64, n_shells: usize) -> Self {
        NormSeries {
            s,
            current: vec![0.0; n_shells],
            running_max: vec![0.0; n_shells],
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Ingest the per-shell `L^2` profile of the field at a new time sample.
    pub fn accumulate_profile(&mut self, profile: &[f64]) {
        assert_eq!(profile.len(), self.current.len());
        for (slot, &v) in profile.iter().enumerate() {
            let w = (ShellMap::shell_at_slot(slot) as f64 * self.s).exp2() * v;
            self.current[slot] = w;
            if w > self.running_max[slot] {
                self.running_max[slot] = w;
            }
        }
    }

    /// Ingest a field directly (convenience wrapper).
    pub fn accumulate(&mut self, map: &ShellMap, f: &SpectralField) {
        let profile = shell_l2_profile(map, f);
        self.accumulate_profile(&profile);
    }

    /// Instantaneous `B^s` norm of the last ingested sample.
    pub fn besov_current(&self) -> f64 {
        self.current.iter().sum()
    }

    /// The `L~^inf` norm over all ingested samples: per-shell maxima summed.
    pub fn ltilde(&self) -> f64 {
        self.running_max.iter().sum()
    }

    pub fn shell_values(&self) -> &[f64] {
        &self.current
    }

    pub fn shell_maxima(&self) -> &[f64] {
        &self.running_max
    }

    /// CSV rows `step, t, shell j, shell value, cumulative B^s, cumulative
    /// L~^inf`, one row per grid-supported shell.
    pub fn write_csv_rows<W: Write>(&self, out: &mut W, step: u64, t: f64) -> Result<()> {
        let besov = self.besov_current();
        let ltilde = self.ltilde();
        for (slot, &v) in self.current.iter().enumerate() {
            writeln!(
                out,
                "{},{:.12e},{},{:.12e},{:.12e},{:.12e}",
                step,
                t,
                ShellMap::shell_at_slot(slot),
                v,
                besov,
                ltilde
            )?;
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "step,t,shell_j,shell_value,besov_s,ltilde_s";
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{plus_modulus, Grid};
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
    fn zero_field_has_zero_norm() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        assert_eq!(besov_norm(&SpectralField::zeros(&grid), 3.5), 0.0);
    }

    #[test]
    fn single_shell_field_is_weighted_seminorm() {
        let grid = Grid::new(16, 16, 4.0).unwrap();
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(3, 0, 0, Complex64::new(1.0, 2.0)); // shell 1
        let l2 = f.l2_norm();
        for s in [0.0f64, 1.5, 3.5] {
            let expect = s.exp2() * l2; // 2^{1*s}
            assert!((besov_norm(&f, s) - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn two_shell_field_matches_exhaustive_enumeration() {
        let grid = Grid::new(16, 16, 4.0).unwrap();
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(1, 0, 0, Complex64::new(0.4, -0.1)); // shell 0
        f.set_mode(0, 5, 0, Complex64::new(-0.3, 0.2)); // shell 2
        f.set_mode(0, 0, 2, Complex64::new(0.7, 0.0)); // |xi3| = pi/2, ball
        let s = 2.5;
        // Brute force: walk every coefficient, classify, sum.
        let mut by_shell = std::collections::BTreeMap::<i32, f64>::new();
        for (idx, c) in f.coeffs().indexed_iter() {
            if c.norm() > 0.0 {
                let j = super::super::shells::shell_index(grid.xi_modulus(idx));
                *by_shell.entry(j).or_insert(0.0) += c.norm_sqr();
            }
        }
        let brute: f64 = by_shell
            .into_iter()
            .map(|(j, sq)| (j as f64 * s).exp2() * sq.sqrt())
            .sum();
        assert!((besov_norm(&f, s) - brute).abs() < 1e-12 * brute);
    }

    #[test]
    fn plus_modulus_preserves_besov_norms_exactly() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 5);
        let p = plus_modulus(&f);
        for s in [0.0, 1.5, 3.5] {
            let a = besov_norm(&f, s);
            let b = besov_norm(&p, s);
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn hs_is_dominated_by_besov_and_besov_dominates_l2() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 6);
        for s in [0.0, 1.5, 3.5] {
            assert!(hs_norm(&f, s) <= besov_norm(&f, s) * (1.0 + 1e-12));
        }
        assert!(f.l2_norm() <= besov_norm(&f, 0.0) * (1.0 + 1e-12));
    }

    #[test]
    fn shell_truncation_is_monotone_in_norm() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let f = random_field(&grid, 7);
        let map = ShellMap::new(&grid);
        let mut partial = SpectralField::zeros(&grid);
        let mut prev = 0.0;
        for slot in 0..map.n_shells() {
            partial.add_assign_scaled(
                &super::super::shells::shell_restrict(&f, ShellMap::shell_at_slot(slot)),
                1.0,
            );
            let b = besov_norm(&partial, 1.5);
            assert!(b >= prev - 1e-14);
            prev = b;
        }
        assert!(prev <= besov_norm(&f, 1.5) * (1.0 + 1e-12));
    }

    #[test]
    fn accumulator_tracks_per_shell_maxima() {
        let grid = Grid::new(16, 16, 4.0).unwrap();
        let map = ShellMap::new(&grid);
        let s = 1.0;

        // Two samples with disjoint shell supports.
        let mut f1 = SpectralField::zeros(&grid);
        f1.set_mode(1, 0, 0, Complex64::new(1.0, 0.0)); // shell 0
        let mut f2 = SpectralField::zeros(&grid);
        f2.set_mode(4, 1, 0, Complex64::new(2.0, 0.0)); // |xi|~4.1, shell 2

        let mut series = NormSeries::new(s, map.n_shells());
        series.accumulate(&map, &f1);
        let b1 = series.besov_current();
        assert!((series.ltilde() - b1).abs() < 1e-14);

        series.accumulate(&map, &f2);
        let b2 = series.besov_current();
        assert!((series.ltilde() - (b1 + b2)).abs() < 1e-12 * (b1 + b2));
        assert!(series.ltilde() > b1.max(b2));
    }

    #[test]
    fn accumulator_matches_brute_force_on_random_sequences() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let map = ShellMap::new(&grid);
        let s = 1.5;
        let fields: Vec<_> = (0..10).map(|k| random_field(&grid, 100 + k)).collect();
        let mut series = NormSeries::new(s, map.n_shells());
        for f in &fields {
            series.accumulate(&map, f);
        }
        // Brute force: per-shell max over samples, then weighted sum.
        let mut max_per_shell = vec![0.0f64; map.n_shells()];
        for f in &fields {
            for (slot, v) in shell_l2_profile(&map, f).into_iter().enumerate() {
                max_per_shell[slot] = max_per_shell[slot].max(v);
            }
        }
        let brute: f64 = max_per_shell
            .iter()
            .enumerate()
            .map(|(slot, &v)| (ShellMap::shell_at_slot(slot) as f64 * s).exp2() * v)
            .sum();
        assert!((series.ltilde() - brute).abs() < 1e-12 * brute);
        // Dominates the instantaneous norm at every sample.
        for f in &fields {
            assert!(series.ltilde() >= besov_norm(f, s) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn csv_rows_have_expected_shape() {
        let grid = Grid::new(16, 16, 4.0).unwrap();
        let map = ShellMap::new(&grid);
        let mut series = NormSeries::new(3.5, map.n_shells());
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(2, 0, 0, Complex64::new(1.0, 0.0));
        series.accumulate(&map, &f);
        let mut buf = Vec::new();
        series.write_csv_rows(&mut buf, 7, 0.125).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), map.n_shells());
        assert!(lines[0].starts_with("7,1.250000000000e-1,-1,"));
    }
}
