//! Run-level monitors: the empirical constants that turn the two a-priori
//! estimates into equalities, and the paradifferential identity that moves
//! the vertical derivative off the `w^3` factor through the divergence-free
//! relation.

use crate::error::Result;
use crate::paraproduct::{bony_split, paraproduct};
use crate::spectral::{dealiased_product, derivative, Axis3, SpectralField};

use super::initial::InitialReport;
use super::state::StepDiagnostics;

/// Fitted proposition constants at one checkpoint.
#[derive(Debug, Clone, Copy)]
pub struct PropositionSample {
    pub t: f64,
    /// Makes `theta(T) <= W0 + C * ||v_Phi|| * theta(T)` an equality.
    pub c1: Option<f64>,
    /// Makes `||v^h_Phi|| <= V0h + C (1/lambda + ||v_Phi||) ||v^h_Phi||`
    /// an equality.
    pub c2: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PropositionReport {
    pub samples: Vec<PropositionSample>,
    pub c1_max: Option<f64>,
    pub c2_max: Option<f64>,
    /// `C_0 = C_1 + C_2` (clamped at zero from below), and the bootstrap
    /// parameters it would prescribe: `lambda* = 1/(2 C_0)`,
    /// `eta* = 1/(12 C_0)`. Infinite when both constants are nonpositive.
    pub lambda_star: f64,
    pub eta_star: f64,
}

/// Fit the two proposition constants along a run.
///
/// Checkpoints with vanishing denominators are skipped (the ratio is
/// undefined there).
pub fn proposition_monitor(
    history: &[StepDiagnostics],
    initial: &InitialReport,
    eps: f64,
    lambda: f64,
    stride: usize,
) -> PropositionReport {
    let w0 = eps * initial.w0h_b72 + initial.w03_b72;
    let v0h = initial.v0h_b72;
    let mut samples = Vec::new();
    let mut c1_max: Option<f64> = None;
    let mut c2_max: Option<f64> = None;
    let tiny = 1e-14;
    for (i, d) in history.iter().enumerate() {
        if i % stride != 0 && i + 1 != history.len() {
            continue;
        }
        let c1 = if d.theta > tiny && d.ltilde_v_phi > tiny {
            Some((d.theta - w0) / (d.ltilde_v_phi * d.theta))
        } else {
            None
        };
        let c2 = if d.ltilde_vh_phi > tiny {
            Some(
                (d.ltilde_vh_phi - v0h)
                    / ((1.0 / lambda + d.ltilde_v_phi) * d.ltilde_vh_phi),
            )
        } else {
            None
        };
        if let Some(v) = c1 {
            c1_max = Some(c1_max.map_or(v, |m: f64| m.max(v)));
        }
        if let Some(v) = c2 {
            c2_max = Some(c2_max.map_or(v, |m: f64| m.max(v)));
        }
        samples.push(PropositionSample { t: d.t, c1, c2 });
    }
    let c0 = c1_max.unwrap_or(0.0).max(0.0) + c2_max.unwrap_or(0.0).max(0.0);
    let (lambda_star, eta_star) = if c0 > 0.0 {
        (1.0 / (2.0 * c0), 1.0 / (12.0 * c0))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    PropositionReport {
        samples,
        c1_max,
        c2_max,
        lambda_star,
        eta_star,
    }
}

/// Residual of the exact paradifferential identity
///
/// `d_3(w^3 a) = d_3 T_{w^3} a + R_{w^3} d_3 a
///               - sum_l [ d_l R_{w^l} a - R_{w^l} d_l a ]`,
///
/// valid whenever `div w = 0` (the substitution `d_3 w^3 = -div_h w^h`
/// moves the vertical derivative off the low-frequency slot). Returns
/// `max |LHS - RHS| / max |LHS|`.
pub fn vertical_transfer_residual(
    w: [&SpectralField; 3],
    a: &SpectralField,
) -> Result<f64> {
    let lhs = derivative(&dealiased_product(w[2], a)?, Axis3::X3, 1);

    let mut rhs = derivative(&paraproduct(w[2], a)?, Axis3::X3, 1);
    let split = bony_split(w[2], &derivative(a, Axis3::X3, 1))?;
    rhs.add_assign_scaled(&split.r_ab, 1.0);
    for (l, axis) in [(0usize, Axis3::X1), (1usize, Axis3::X2)] {
        let r_wl_a = bony_split(w[l], a)?.r_ab;
        rhs.add_assign_scaled(&derivative(&r_wl_a, axis, 1), -1.0);
        let r_wl_da = bony_split(w[l], &derivative(a, axis, 1))?.r_ab;
        rhs.add_assign_scaled(&r_wl_da, 1.0);
    }

    let diff = lhs.subtracted(&rhs)?.max_coeff_modulus();
    let scale = lhs.max_coeff_modulus().max(1e-300);
    Ok(diff / scale)
}
