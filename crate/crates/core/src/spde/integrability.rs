//! Integrability bookkeeping for solver runs.
//!
//! The energy identity needs the drift pairing `Σ_i ∫ <v_i*, v> dA` to be
//! absolutely integrable, and on a run of the lattice equation the cheap
//! sufficient bound pairs the flux against the gradient norm:
//!
//! ```text
//! |<Δ_{p1} u, u>| <= η_1 ‖u‖_{W^{1,p1}},   |<|u|^{p2-2} u, u>| = ‖u‖_{L^{p2}}^{p2}
//! ```
//!
//! so everything is controlled by mixed products of the two norm tracks.
//! When `p1 >= p2` Young's inequality folds the cross product
//! `‖u‖_{W^{1,p1}} ‖u‖_{L^{p2}}^{p2-1}` into the two pure hypothesis
//! integrands `‖u‖_{W^{1,p1}}^{p1}` and `‖u‖_{L^{p2}}^{p2}`, and the ratio
//! below stays bounded along any trajectory. When `p1 < p2` no such
//! folding exists: a fixed profile with amplitude `a` gives a ratio that
//! grows like `a^{p2-p1}` until the `p2` integrand takes over, which is
//! exactly the gap this report measures.

use serde::{Deserialize, Serialize};

use crate::spde::euler::SpdeRun;
use crate::Result;

/// Hypothesis and cross integrals of one run, all against the driver
/// measure `dA` (atoms of size `dt` at the step times).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub p1: f64,
    pub p2: f64,
    /// `true` when `p1 < p2`: the cross integrand escapes every Young
    /// bound by the hypothesis integrands.
    pub gap: bool,
    /// `∫ ‖u‖_{V_i}^{p_i} dA` for the two member spaces.
    pub path_integrals: [f64; 2],
    /// `(∫ η_i^{q_i} dA)^{1/q_i}` for the two drift densities.
    pub size_integrals: [f64; 2],
    /// `∫ ‖u‖_{W^{1,p1}} ‖u‖_{L^{p2}}^{p2-1} dA`.
    pub cross_integral: f64,
    /// Atom times of the run (step times past zero).
    pub step_times: Vec<f64>,
    /// Per-atom ratio of the cross integrand to the summed hypothesis
    /// integrands; zero where the state vanishes.
    pub ratios: Vec<f64>,
    /// Last ratio over the first positive one; zero for an all-zero run.
    pub growth: f64,
}

/// Integrate the hypothesis and cross quantities of a finished run.
pub fn integrability_report(run: &SpdeRun) -> Result<IntegrabilityReport> {
    let family = run.scenario.family();
    let driver = run.scenario.driver();
    let p1 = family.space(0)?.p;
    let p2 = family.space(1)?.p;
    let end = *run.step_times.last().expect("runs have at least one step");

    let mut path_integrals = [0.0, 0.0];
    let mut cross_integral = 0.0;
    let mut ratios = Vec::with_capacity(run.step_times.len() - 1);
    for (k, t) in run.step_times.iter().enumerate().skip(1) {
        let da = driver.jump_at(*t);
        let w1 = run.w1p_norms[k];
        let lp = run.lp_norms[k];
        let hyp = w1.powf(p1) + lp.powf(p2);
        let cross = w1 * lp.powf(p2 - 1.0);
        path_integrals[0] += da * w1.powf(p1);
        path_integrals[1] += da * lp.powf(p2);
        cross_integral += da * cross;
        ratios.push(if hyp > 0.0 { cross / hyp } else { 0.0 });
    }

    let drifts = run.scenario.drifts();
    let size_integrals = [
        drifts[0].integrated_size(family, driver, end)?,
        drifts[1].integrated_size(family, driver, end)?,
    ];
    let growth = match ratios.iter().find(|r| **r > 0.0) {
        Some(first) => ratios.last().expect("nonempty") / first,
        None => 0.0,
    };
    Ok(IntegrabilityReport {
        p1,
        p2,
        gap: p1 < p2,
        path_integrals,
        size_integrals,
        cross_integral,
        step_times: run.step_times[1..].to_vec(),
        ratios,
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spde::config::SpdeConfig;
    use crate::spde::euler::{amplitude_ramp_run, euler_run};

    fn quiet(cfg: SpdeConfig) -> SpdeConfig {
        SpdeConfig { wiener_sigma: 0.0, jump_rate: 0.0, ..cfg }
    }

    #[test]
    fn resting_run_reports_all_zeros() {
        let cfg = quiet(SpdeConfig {
            initial_amplitude: 0.0,
            grid_points: 6,
            horizon: 0.01,
            ..SpdeConfig::default()
        });
        let report = integrability_report(&euler_run(&cfg).unwrap()).unwrap();
        assert_eq!(report.path_integrals, [0.0, 0.0]);
        assert_eq!(report.size_integrals, [0.0, 0.0]);
        assert_eq!(report.cross_integral, 0.0);
        assert!(report.ratios.iter().all(|r| *r == 0.0));
        assert_eq!(report.growth, 0.0);
    }

    #[test]
    fn matching_exponents_flag_no_gap_and_a_flat_ratio() {
        // p1 = p2: for a fixed profile the amplitude cancels from the
        // ratio, so a twenty-fold ramp moves it only by rounding.
        let cfg = quiet(SpdeConfig {
            grid_points: 8,
            p1: 2.0,
            p2: 2.0,
            dt: 0.01,
            ..SpdeConfig::default()
        });
        let report =
            integrability_report(&amplitude_ramp_run(&cfg, 0.1, 2.0, 30).unwrap()).unwrap();
        assert!(!report.gap);
        let max = report.ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = report.ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 1.0 + 1e-9, "ratio drifted: {min} .. {max}");
        assert!((report.growth - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn split_exponents_flag_a_gap_with_growing_ratio_and_finite_hypotheses() {
        let cfg = quiet(SpdeConfig {
            grid_points: 8,
            p1: 1.5,
            p2: 4.0,
            dt: 0.01,
            ..SpdeConfig::default()
        });
        let report =
            integrability_report(&amplitude_ramp_run(&cfg, 0.1, 2.0, 30).unwrap()).unwrap();
        assert!(report.gap);
        assert!(report.ratios.windows(2).all(|w| w[0] < w[1]), "ratio must grow monotonically");
        assert!(report.growth > 10.0, "growth {}", report.growth);
        for v in report.path_integrals.iter().chain(&report.size_integrals) {
            assert!(v.is_finite() && *v > 0.0);
        }
    }

    #[test]
    fn report_serialises_for_external_consumers() {
        let cfg = quiet(SpdeConfig { grid_points: 6, horizon: 0.01, ..SpdeConfig::default() });
        let report = integrability_report(&euler_run(&cfg).unwrap()).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: IntegrabilityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
