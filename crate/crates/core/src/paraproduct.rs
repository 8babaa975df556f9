//! Bony decomposition of products by relative frequency size.
//!
//! `T_a b` pairs the low frequencies of `a` (the closed ball of radius `2^j`)
//! against each dyadic shell `j` of `b`; the remainder is defined as the
//! exact complement `R_a b := ab - T_a b`, which keeps the reconstruction
//! identity literal on the grid. Both operators act region-wise on frequency
//! pairs, so they are bilinear, commute with derivatives slot-wise, and are
//! dominated coefficient-wise after any subadditive exponential weight.

use crate::besov::{besov_from_profile, shell_l2_profile, shell_restrict, SeparableWeight, ShellMap};
use crate::error::Result;
use crate::spectral::{dealiased_product, plus_modulus, SpectralField};

/// The two halves of a Bony split. `t_ab + r_ab` equals the dealiased
/// product exactly.
#[derive(Debug, Clone)]
pub struct ParaproductPair {
    pub t_ab: SpectralField,
    pub r_ab: SpectralField,
}

/// Closed low-pass radius paired with shell `j` of the second factor.
fn low_radius(j: i32) -> f64 {
    if j < 0 {
        0.5
    } else {
        (j as f64).exp2()
    }
}

/// Restriction of `a` to the closed ball `|xi| <= r`.
fn low_pass(a: &SpectralField, r: f64) -> SpectralField {
    let r_sq = r * r;
    a.retain(move |k1, k2, x3| k1 * k1 + k2 * k2 + x3 * x3 <= r_sq)
}

/// The paraproduct `T_a b` alone.
pub fn paraproduct(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let map = ShellMap::new(a.grid());
    let mut t_ab = SpectralField::zeros(a.grid());
    for slot in 0..map.n_shells() {
        let j = ShellMap::shell_at_slot(slot);
        let b_shell = shell_restrict(b, j);
        if b_shell.max_coeff_modulus() == 0.0 {
            continue;
        }
        let a_low = low_pass(a, low_radius(j));
        if a_low.max_coeff_modulus() == 0.0 {
            continue;
        }
        let term = dealiased_product(&a_low, &b_shell)?;
        t_ab.add_assign_scaled(&term, 1.0);
    }
    Ok(t_ab)
}

/// Full Bony split of the dealiased product `ab`.
pub fn bony_split(a: &SpectralField, b: &SpectralField) -> Result<ParaproductPair> {
    let t_ab = paraproduct(a, b)?;
    let full = dealiased_product(a, b)?;
    let r_ab = full.subtracted(&t_ab)?;
    Ok(ParaproductPair { t_ab, r_ab })
}

/// Residual of the reconstruction identity, relative to the product scale.
pub fn reconstruction_residual(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let pair = bony_split(a, b)?;
    let full = dealiased_product(a, b)?;
    let sum = pair.t_ab.added(&pair.r_ab)?;
    let diff = sum.subtracted(&full)?.max_coeff_modulus();
    Ok(diff / full.max_coeff_modulus().max(1e-300))
}

/// Pointwise slacks of the weighted-modulus domination
/// `|F((X_a b)_Psi)| <= F(X_{a^+_Psi} b^+_Psi)` for `X` in `{T, R}`.
/// Nonpositive (up to rounding) whenever `Psi` is subadditive.
#[derive(Debug, Clone, Copy)]
pub struct DominationSlack {
    pub t_slack: f64,
    pub r_slack: f64,
}

pub fn phase_domination_check(
    a: &SpectralField,
    b: &SpectralField,
    weight: &SeparableWeight,
) -> Result<DominationSlack> {
    let split = bony_split(a, b)?;
    let a_plus = plus_modulus(&weight.apply(a));
    let b_plus = plus_modulus(&weight.apply(b));
    let split_plus = bony_split(&a_plus, &b_plus)?;

    let slack_of = |x: &SpectralField, x_plus: &SpectralField| -> f64 {
        let weighted = weight.apply(x);
        let mut worst = f64::NEG_INFINITY;
        for (c, d) in weighted.coeffs().iter().zip(x_plus.coeffs().iter()) {
            let s = c.norm() - d.re;
            if s > worst {
                worst = s;
            }
        }
        worst
    };

    Ok(DominationSlack {
        t_slack: slack_of(&split.t_ab, &split_plus.t_ab),
        r_slack: slack_of(&split.r_ab, &split_plus.r_ab),
    })
}

/// Empirical constants of the bilinear estimate: the ratios
/// `||(T_a b)_Psi||_{B^s} / (||a_Psi||_{B^{3/2}} ||b_Psi||_{B^s})` and the
/// same for `R`. Zero numerators are reported as zero.
#[derive(Debug, Clone, Copy)]
pub struct ProductEstimate {
    pub t_ratio: f64,
    pub r_ratio: f64,
}

pub fn product_estimate(
    a: &SpectralField,
    b: &SpectralField,
    s: f64,
    weight: Option<&SeparableWeight>,
) -> Result<ProductEstimate> {
    assert!(s > 0.0, "the bilinear estimate needs s > 0");
    let map = ShellMap::new(a.grid());
    let apply = |f: &SpectralField| match weight {
        Some(w) => w.apply(f),
        None => f.clone(),
    };
    let split = bony_split(a, b)?;
    let t_norm = besov_from_profile(&shell_l2_profile(&map, &apply(&split.t_ab)), s);
    let r_norm = besov_from_profile(&shell_l2_profile(&map, &apply(&split.r_ab)), s);
    let a_norm = besov_from_profile(&shell_l2_profile(&map, &apply(a)), 1.5);
    let b_norm = besov_from_profile(&shell_l2_profile(&map, &apply(b)), s);
    let den = a_norm * b_norm;
    if den == 0.0 {
        return Ok(ProductEstimate {
            t_ratio: 0.0,
            r_ratio: 0.0,
        });
    }
    Ok(ProductEstimate {
        t_ratio: t_norm / den,
        r_ratio: r_norm / den,
    })
}
