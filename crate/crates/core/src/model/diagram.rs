//! Global-existence versus admissibility-loss survey over `(gamma,
//! amplitude)` and the bisection that locates the small-data threshold.

use rayon::prelude::*;

use crate::error::Result;

use super::{
    default_profile, run_model, x_norm, EarlyExit, ModelClass, ModelParams, ModelRun,
};

/// One cell of the survey.
#[derive(Debug, Clone)]
pub struct DiagramCell {
    pub gamma: f64,
    pub amplitude: f64,
    pub x_norm: f64,
    pub class: ModelClass,
    pub theta_final: f64,
    pub margin_final: f64,
    pub steps: u64,
}

/// Run every `(gamma, amplitude)` cell to `t_max(gamma) = horizon / gamma`.
/// Cells are independent and run in parallel; rows come back sorted.
pub fn phase_diagram(
    base: &ModelParams,
    n_modes: usize,
    gammas: &[f64],
    amplitudes: &[f64],
    horizon: f64,
) -> Result<Vec<DiagramCell>> {
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for &g in gammas {
        for &a in amplitudes {
            cells.push((g, a));
        }
    }
    let mut rows: Vec<DiagramCell> = cells
        .par_iter()
        .map(|&(gamma, amplitude)| {
            let p = ModelParams { gamma, ..*base };
            let u0 = default_profile(n_modes, amplitude);
            let xn = x_norm(&u0, p.delta).unwrap_or(f64::NAN);
            let run = run_model(u0, &p, horizon / gamma, Some(EarlyExit::default()))
                .expect("model run only fails on configuration errors");
            DiagramCell {
                gamma,
                amplitude,
                x_norm: xn,
                class: run.class,
                theta_final: run.theta_final,
                margin_final: run.margin_final,
                steps: run.steps,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.gamma, a.amplitude)
            .partial_cmp(&(b.gamma, b.amplitude))
            .unwrap()
    });
    Ok(rows)
}

/// Result of the bisection for the small-data constant.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    /// Largest amplitude classified global.
    pub amplitude_global: f64,
    /// Smallest amplitude classified non-global.
    pub amplitude_lost: f64,
    /// The located constant: `x_norm(amplitude_global * profile) / gamma`.
    pub c_fitted: f64,
    pub runs: usize,
}

/// Bisection on the amplitude between a globally decaying run and a run
/// that fails the global criteria, at fixed `gamma`. The constant is
/// reported, never asserted.
pub fn locate_global_threshold(
    p: &ModelParams,
    n_modes: usize,
    horizon: f64,
    iterations: usize,
) -> Result<ThresholdReport> {
    let is_global = |amp: f64, runs: &mut usize| -> Result<bool> {
        *runs += 1;
        let u0 = default_profile(n_modes, amp);
        let run: ModelRun = run_model(u0, p, horizon / p.gamma, Some(EarlyExit::default()))?;
        Ok(run.class == ModelClass::Global)
    };

    let mut runs = 0;
    let mut lo = 1e-3;
    while !is_global(lo, &mut runs)? {
        lo *= 0.25;
        if lo < 1e-12 {
            break;
        }
    }
    let mut hi = lo * 2.0;
    while is_global(hi, &mut runs)? {
        hi *= 2.0;
        if hi > 1e6 {
            break;
        }
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if is_global(mid, &mut runs)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = x_norm(&default_profile(n_modes, lo), p.delta)? / p.gamma;
    Ok(ThresholdReport {
        amplitude_global: lo,
        amplitude_lost: hi,
        c_fitted: c,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_row_is_global() {
        let p = ModelParams::default();
        let rows = phase_diagram(&p, 64, &[0.5, 1.0], &[0.0], 20.0).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert_eq!(r.class, ModelClass::Global);
            assert_eq!(r.x_norm, 0.0);
        }
    }

    #[test]
    fn bisection_separates_global_from_lost() {
        let p = ModelParams::default();
        let report = locate_global_threshold(&p, 64, 40.0, 6).unwrap();
        assert!(report.amplitude_global < report.amplitude_lost);
        assert!(report.c_fitted > 0.0);
        assert!(report.c_fitted.is_finite());
    }

    #[test]
    fn shrinking_gamma_degrades_classification() {
        let p = ModelParams::default();
        let amp = 0.02; // global at gamma = 4, lost well below that
        let gammas = [4.0, 1.0, 0.25];
        let rows = phase_diagram(&p, 64, &gammas, &[amp], 30.0).unwrap();
        // Count how "good" each class is; must be monotone nonincreasing in
        // gamma ordering from large to small.
        let score = |c: &ModelClass| match c {
            ModelClass::Global => 2,
            ModelClass::Undecided => 1,
            _ => 0,
        };
        let mut by_gamma: Vec<(f64, i32)> =
            rows.iter().map(|r| (r.gamma, score(&r.class))).collect();
        by_gamma.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        for w in by_gamma.windows(2) {
            assert!(
                w[0].1 >= w[1].1,
                "classification should not improve as gamma shrinks: {by_gamma:?}"
            );
        }
    }
}
