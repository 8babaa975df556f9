//! The bootstrap phase `Phi(t, xi) = sqrt(t)|xi_h| + (a - lambda*theta)|xi_3|`
//! and its inequality checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

use super::weights::SeparableWeight;

/// Parameters `(a, lambda, eps)` and the running analyticity loss
/// `theta(t)`. The phase is admissible only while `lambda*theta <= a`.
#[derive(Debug, Clone, Copy)]
pub struct PhaseState {
    pub a: f64,
    pub lambda: f64,
    pub eps: f64,
    pub theta: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(a: f64, lambda: f64, eps: f64) -> Self {
        assert!(a > 0.0 && lambda > 0.0 && eps > 0.0);
        PhaseState {
            a,
            lambda,
            eps,
            theta: 0.0,
            t: 0.0,
        }
    }

    /// Remaining analytic bandwidth `a - lambda*theta`.
    pub fn margin(&self) -> f64 {
        self.a - self.lambda * self.theta
    }

    pub fn is_admissible(&self) -> bool {
        self.margin() >= 0.0
    }

    fn require_admissible(&self) -> Result<()> {
        if !self.is_admissible() {
            return Err(Error::AdmissibilityViolated {
                lambda_theta: self.lambda * self.theta,
                a: self.a,
            });
        }
        Ok(())
    }

    /// `Phi(t, xi)` without the admissibility guard.
    #[inline]
    pub fn phi_unchecked(&self, k1: f64, k2: f64, xi3: f64) -> f64 {
        self.t.sqrt() * (k1 * k1 + k2 * k2).sqrt() + self.margin() * xi3.abs()
    }

    /// `Phi(t, xi)`, failing when the bootstrap margin is exhausted (the
    /// observable breach of the `theta <= a/lambda` bound).
    pub fn phi(&self, k1: f64, k2: f64, xi3: f64) -> Result<f64> {
        self.require_admissible()?;
        Ok(self.phi_unchecked(k1, k2, xi3))
    }

    /// The weight table for `e^{Phi(t, D)}` on a grid.
    pub fn weight(&self, grid: &Grid) -> Result<SeparableWeight> {
        self.require_admissible()?;
        SeparableWeight::phase(grid, self.t, self.margin())
    }

    /// The weight table for `e^{-Phi(t, D)}`.
    pub fn inverse_weight(&self, grid: &Grid) -> Result<SeparableWeight> {
        self.require_admissible()?;
        SeparableWeight::phase_negated(grid, self.t, self.margin())
    }

    /// Apply `e^{Phi(t,D)}` to a field.
    pub fn weighted(&self, f: &SpectralField) -> Result<SpectralField> {
        Ok(self.weight(f.grid())?.apply(f))
    }
}

/// Largest violation of the subadditivity `Phi(xi) <= Phi(xi - eta) +
/// Phi(eta)` over sampled lattice pairs. Nonpositive up to rounding for any
/// admissible state.
pub fn subadditivity_violation(ps: &PhaseState, grid: &Grid, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ch = grid.dealias_cutoff_h();
    let cv = grid.dealias_cutoff_v();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let xi = (
            rng.random_range(-ch..=ch) as f64,
            rng.random_range(-ch..=ch) as f64,
            rng.random_range(-cv..=cv) as f64 * grid.xi3_spacing(),
        );
        let eta = (
            rng.random_range(-ch..=ch) as f64,
            rng.random_range(-ch..=ch) as f64,
            rng.random_range(-cv..=cv) as f64 * grid.xi3_spacing(),
        );
        let lhs = ps.phi_unchecked(xi.0, xi.1, xi.2);
        let rhs = ps.phi_unchecked(xi.0 - eta.0, xi.1 - eta.1, xi.2 - eta.2)
            + ps.phi_unchecked(eta.0, eta.1, eta.2);
        let v = lhs - rhs;
        if v > worst {
            worst = v;
        }
    }
    worst
}

/// Slack of the relaxed phase-heat inequality between two states of the same
/// run:
///
/// `Phi(t,xi) - Phi(t',xi) <= -lambda|xi_3| (theta(t) - theta(t')) +
/// ((t-t')/2)|xi_h|^2 + 1/2`.
///
/// The vertical parts cancel identically (`theta(t) - theta(t')` is exactly
/// the integral of `theta_dot`), so the slack reduces to the horizontal
/// Young bound; the additive `1/2` is the absorbed constant without which
/// the literal inequality can fail for small `t |xi_h|^2`.
pub fn phase_decay_slack(
    now: &PhaseState,
    earlier: &PhaseState,
    k1: f64,
    k2: f64,
    xi3: f64,
) -> f64 {
    assert!(earlier.t <= now.t, "states must be time ordered");
    assert!(
        earlier.a == now.a && earlier.lambda == now.lambda,
        "states must share (a, lambda)"
    );
    let lhs = now.phi_unchecked(k1, k2, xi3) - earlier.phi_unchecked(k1, k2, xi3);
    let kh_sq = k1 * k1 + k2 * k2;
    let rhs = -now.lambda * xi3.abs() * (now.theta - earlier.theta)
        + 0.5 * (now.t - earlier.t) * kh_sq
        + 0.5;
    rhs - lhs
}

/// Slack of the horizontal Young bound
/// `(sqrt(t) - sqrt(t'))|xi_h| <= ((t - t')/2)|xi_h|^2 + 1/2`,
/// the scalar heart of the relaxed phase-heat inequality.
pub fn young_slack(t: f64, t_prev: f64, kh: f64) -> f64 {
    0.5 + 0.5 * (t - t_prev) * kh * kh - (t.sqrt() - t_prev.sqrt()) * kh
}

/// Minimum Young slack over `n` sampled triples `(t, t', |xi_h| >= 1)`.
/// Returns `(min_slack, violations)` where a violation is negative slack.
pub fn sample_young_bound(n: usize, seed: u64, t_max: f64, kh_max: f64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_slack = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..n {
        let t_prev = rng.random::<f64>() * t_max;
        let t = t_prev + rng.random::<f64>() * (t_max - t_prev);
        let kh = 1.0 + rng.random::<f64>() * (kh_max - 1.0);
        let s = young_slack(t, t_prev, kh);
        if s < min_slack {
            min_slack = s;
        }
        if s < 0.0 {
            violations += 1;
        }
    }
    (min_slack, violations)
}

impl SeparableWeight {
    /// `e^{-(sqrt(t)|xi_h| + c|xi_3|)}`.
    pub fn phase_negated(grid: &Grid, t: f64, c: f64) -> Result<Self> {
        let st = t.sqrt();
        Self::from_exponent_parts(grid, move |kh| -st * kh, move |x3| -c * x3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_phase_is_the_vertical_weight() {
        let ps = PhaseState::new(1.0, 2.0, 0.5);
        assert_eq!(ps.phi(0.0, 0.0, 3.0).unwrap(), 3.0);
        assert_eq!(ps.phi(4.0, 0.0, 0.0).unwrap(), 0.0); // t = 0
    }

    #[test]
    fn direct_substitution_example() {
        let mut ps = PhaseState::new(1.0, 2.0, 0.5);
        ps.theta = 0.25;
        ps.t = 1.0;
        // a=1, lambda=2, theta=0.25, t=1, xi=(0,0,4):
        // Phi = 0 + (1 - 0.5) * 4 = 2.
        assert!((ps.phi(0.0, 0.0, 4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((ps.margin() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn breach_is_signalled() {
        let mut ps = PhaseState::new(1.0, 2.0, 0.5);
        ps.theta = 0.6; // lambda*theta = 1.2 > a
        assert!(matches!(
            ps.phi(1.0, 0.0, 0.0),
            Err(Error::AdmissibilityViolated { .. })
        ));
    }

    #[test]
    fn phase_is_subadditive_on_sampled_lattice_triples() {
        let grid = Grid::new(16, 32, 8.0).unwrap();
        let mut ps = PhaseState::new(1.0, 4.0, 0.5);
        ps.theta = 0.2;
        ps.t = 0.7;
        let worst = subadditivity_violation(&ps, &grid, 20_000, 42);
        assert!(worst <= 1e-12, "worst violation {worst}");
    }

    #[test]
    fn decay_slack_vanishes_at_equal_times_and_telescopes_vertically() {
        let mut a = PhaseState::new(1.0, 8.0, 0.5);
        a.t = 0.3;
        a.theta = 0.05;
        let b = a;
        assert!(phase_decay_slack(&b, &a, 2.0, 1.0, 1.5).abs() < 0.5 + 1e-15);
        // t = t' gives slack exactly 1/2 (the absorbed constant).
        assert!((phase_decay_slack(&b, &a, 2.0, 1.0, 1.5) - 0.5).abs() < 1e-14);

        // Pure vertical mode: slack is exactly 1/2 regardless of theta gap.
        let mut later = a;
        later.t = 0.9;
        later.theta = 0.11;
        let s = phase_decay_slack(&later, &a, 0.0, 0.0, 2.5);
        assert!((s - 0.5).abs() < 1e-13, "vertical slack {s}");
    }

    #[test]
    fn young_bound_has_no_violations_on_samples() {
        let (min_slack, violations) = sample_young_bound(100_000, 7, 50.0, 45.0);
        assert_eq!(violations, 0);
        assert!(min_slack >= 0.0);
    }

    #[test]
    fn weight_and_inverse_cancel() {
        let grid = Grid::new(8, 16, 4.0).unwrap();
        let mut ps = PhaseState::new(1.0, 2.0, 0.5);
        ps.t = 0.4;
        ps.theta = 0.1;
        let mut f = SpectralField::zeros(&grid);
        f.set_mode(2, 1, 3, num_complex::Complex64::new(0.3, -0.7));
        let g = ps.weighted(&f).unwrap();
        let back = ps.inverse_weight(&grid).unwrap().apply(&g);
        let rel = back.subtracted(&f).unwrap().max_coeff_modulus() / f.max_coeff_modulus();
        assert!(rel < 1e-12);
    }
}
