//! Explicit-Euler runs packaged as exact-ledger scenarios.
//!
//! One Euler step of the lattice equation is
//!
//! ```text
//! u_{k+1} = u_k + [Δ_{p1} u_k + |u_k|^{p2-2} u_k] dt + f(u_k) ΔW_k + jumps
//! ```
//!
//! which is *literally* a pure-jump scenario: the driver places an atom of
//! size `dt` at every step time, the two drift densities sample the
//! operators at the pre-step state, and the accumulated noise increments
//! form the jump-martingale path started at the initial profile. The
//! composed path of that scenario reproduces the Euler iterates at the
//! step times, so the energy identity holds there with zero discretisation
//! slack — the ledger residual measures only rounding.
//!
//! Blow-ups are refusals, not NaN cascades: the run aborts once the pivot
//! norm passes the configured cap, once a state leaves the finite range,
//! or once `dt` falls outside the stability region of the drift linearised
//! at the running amplitude.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::energy::{energy_ledger, EnergyLedger};
use crate::par::map_indexed;
use crate::processes::{
    Convention, DualStepProcess, IncreasingDriver, MartingalePath, Scenario, StepFunction,
    StepPath,
};
use crate::spaces::HVector;
use crate::spde::config::SpdeConfig;
use crate::spde::operator::{edge_slopes, flux_dual_size, p_laplacian, power_drift};
use crate::{Error, Result};

/// A finished run: the scenario that certifies it plus the raw solver
/// trajectory. `states[k]` is the iterate at `step_times[k]` (index 0 is
/// the initial profile) and the two norm tracks are evaluated on exactly
/// those states.
#[derive(Debug, Clone)]
pub struct SpdeRun {
    pub config: SpdeConfig,
    pub scenario: Scenario,
    pub step_times: Vec<f64>,
    pub states: Vec<HVector>,
    /// `‖u_k‖_{W^{1,p1}}` per step.
    pub w1p_norms: Vec<f64>,
    /// `‖u_k‖_{L^{p2}}` per step.
    pub lp_norms: Vec<f64>,
}

impl SpdeRun {
    /// Evaluate the energy ledger at every step time past zero.
    pub fn ledger_sweep(&self) -> Result<Vec<EnergyLedger>> {
        let times = &self.step_times[1..];
        map_indexed(times.len(), |i| energy_ledger(&self.scenario, times[i]))
            .into_iter()
            .collect()
    }
}

/// Stiffness of the drift linearised at the running amplitude:
/// `4 D / dx^2` from the diffusion with `D = (p1-1) |g|_max^{p1-2}`, plus
/// `(p2-1) |u|_max^{p2-2}` from the reaction. Sub-quadratic exponents are
/// skipped — their formal derivative diverges as the state flattens while
/// the actual increments shrink, so the estimate would abort healthy runs;
/// for them the norm cap is the backstop.
fn drift_stiffness(u: &HVector, slopes: &[f64], p1: f64, p2: f64, dx: f64) -> f64 {
    let mut s = 0.0;
    let g_max = slopes.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if p1 >= 2.0 && g_max > 0.0 {
        s += 4.0 * (p1 - 1.0) * g_max.powf(p1 - 2.0) / (dx * dx);
    }
    let u_max = u.max_abs();
    if p2 >= 2.0 && u_max > 0.0 {
        s += (p2 - 1.0) * u_max.powf(p2 - 2.0);
    }
    s
}

/// Package a solver trajectory as a scenario and wrap it in a run record.
///
/// `states` has one entry more than the per-step drift evaluations; noise
/// jumps are listed only at the steps where they are nonzero.
fn assemble_run(
    cfg: &SpdeConfig,
    states: Vec<HVector>,
    lap_values: Vec<HVector>,
    lap_sizes: Vec<f64>,
    pow_values: Vec<HVector>,
    h_times: Vec<f64>,
    h_jumps: Vec<HVector>,
) -> Result<SpdeRun> {
    let family = cfg.family()?;
    let dt = cfg.dt;
    let steps = lap_values.len();
    let times: Vec<f64> = (1..=steps).map(|k| k as f64 * dt).collect();
    let driver = IncreasingDriver::pure_jump(times.iter().map(|t| (*t, dt)).collect())?;
    // Left-continuous pieces cut at the interior step times: the atom at
    // t_{k+1} then samples the drift evaluated at the pre-step state u_k,
    // the explicit-Euler convention.
    let cuts = times[..steps - 1].to_vec();
    let drift_diffusion = DualStepProcess::new(
        &family,
        0,
        StepPath::new(cuts.clone(), lap_values, Convention::LeftContinuous)?,
        StepFunction::new(cuts.clone(), lap_sizes, Convention::LeftContinuous)?,
    )?;
    let drift_reaction = DualStepProcess::with_default_eta(
        &family,
        1,
        StepPath::new(cuts, pow_values, Convention::LeftContinuous)?,
    )?;
    let martingale = MartingalePath::new(states[0].clone(), h_times, h_jumps)?;
    let horizon = steps as f64 * dt;
    let scenario =
        Scenario::new(family, driver, vec![drift_diffusion, drift_reaction], martingale, horizon)?;

    let family = scenario.family();
    let mut w1p_norms = Vec::with_capacity(states.len());
    let mut lp_norms = Vec::with_capacity(states.len());
    for u in &states {
        w1p_norms.push(family.v_norm(u, 0)?);
        lp_norms.push(family.v_norm(u, 1)?);
    }
    let mut step_times = Vec::with_capacity(states.len());
    step_times.push(0.0);
    step_times.extend_from_slice(&times);
    Ok(SpdeRun { config: cfg.clone(), scenario, step_times, states, w1p_norms, lp_norms })
}

/// Run the explicit Euler scheme described by `cfg` and package the
/// trajectory as a pure-jump scenario with an exactly closing ledger.
pub fn euler_run(cfg: &SpdeConfig) -> Result<SpdeRun> {
    cfg.validate()?;
    let family = cfg.family()?;
    let d = cfg.grid_points;
    let dx = cfg.dx();
    let dt = cfg.dt;
    let steps = cfg.steps();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let wiener = Normal::new(0.0, dt.sqrt()).expect("positive step size");
    let poisson = if cfg.jump_rate > 0.0 {
        Some(
            Poisson::new(cfg.jump_rate * dt)
                .map_err(|e| Error::invalid("solver config", format!("jump intensity: {e}")))?,
        )
    } else {
        None
    };
    let mean_inverse_mark = (1..=cfg.jump_marks).map(|z| 1.0 / (1.0 + z as f64)).sum::<f64>()
        / cfg.jump_marks as f64;

    let mut u = cfg.initial_state();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(u.clone());
    let mut lap_values = Vec::with_capacity(steps);
    let mut lap_sizes = Vec::with_capacity(steps);
    let mut pow_values = Vec::with_capacity(steps);
    let mut h_times = Vec::new();
    let mut h_jumps = Vec::new();

    for k in 0..steps {
        let slopes = edge_slopes(&u, dx);
        if dt * drift_stiffness(&u, &slopes, cfg.p1, cfg.p2, dx) > 2.0 {
            return Err(Error::SolverAbort {
                step: k,
                why: "dt outside the stability region of the linearised drift",
                norm: family.h_norm(&u)?,
            });
        }
        let lap = p_laplacian(&u, cfg.p1, dx)?;
        let pow = power_drift(&u, cfg.p2)?;
        lap_sizes.push(flux_dual_size(&u, cfg.p1, dx)?);

        // Noise increment of this step, evaluated at the pre-step state.
        let mut dh = vec![0.0; d];
        if cfg.wiener_sigma > 0.0 {
            for (slot, x) in dh.iter_mut().zip(u.iter()) {
                *slot += cfg.wiener_sigma * x * wiener.sample(&mut rng);
            }
        }
        if let Some(poisson) = &poisson {
            let count = poisson.sample(&mut rng) as usize;
            // compensated marked kicks: Σ 1/(1+z) minus its mean rate
            let mut kick = -(cfg.jump_rate * dt) * mean_inverse_mark;
            for _ in 0..count {
                let z = rng.random_range(1..=cfg.jump_marks) as f64;
                kick += 1.0 / (1.0 + z);
            }
            for (slot, x) in dh.iter_mut().zip(u.iter()) {
                *slot += cfg.jump_gamma * kick * x;
            }
        }

        let next: Vec<f64> = (0..d)
            .map(|j| u.as_slice()[j] + dt * (lap.as_slice()[j] + pow.as_slice()[j]) + dh[j])
            .collect();
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::SolverAbort {
                step: k + 1,
                why: "state left the finite range",
                norm: f64::INFINITY,
            });
        }
        let next = HVector::new(next).expect("finiteness checked");
        let norm = family.h_norm(&next)?;
        if norm > cfg.norm_cap {
            return Err(Error::SolverAbort {
                step: k + 1,
                why: "pivot norm exceeded the blow-up cap",
                norm,
            });
        }

        lap_values.push(lap);
        pow_values.push(pow);
        if dh.iter().any(|x| *x != 0.0) {
            h_times.push((k + 1) as f64 * dt);
            h_jumps.push(HVector::new(dh).expect("finiteness checked"));
        }
        states.push(next.clone());
        u = next;
    }

    assemble_run(cfg, states, lap_values, lap_sizes, pow_values, h_times, h_jumps)
}

/// Deterministic run whose state is a fixed profile with geometrically
/// ramped amplitude `a_k = start · (end / start)^{k / steps}`.
///
/// The drifts are the honest operator evaluations along the prescribed
/// trajectory; whatever the prescription does not explain is carried by
/// the jump path, so the scenario still satisfies the Euler recursion and
/// its ledger closes exactly. This isolates the integrability question —
/// how the cross pairing scales against the hypothesis integrands as the
/// amplitude grows — from solver stability.
pub fn amplitude_ramp_run(
    cfg: &SpdeConfig,
    start_amplitude: f64,
    end_amplitude: f64,
    steps: usize,
) -> Result<SpdeRun> {
    cfg.validate()?;
    if !(start_amplitude.is_finite() && end_amplitude.is_finite() && start_amplitude > 0.0) {
        return Err(Error::invalid("amplitude ramp", "amplitudes must be finite and positive"));
    }
    if end_amplitude <= start_amplitude {
        return Err(Error::invalid("amplitude ramp", "the ramp must increase"));
    }
    if steps < 2 {
        return Err(Error::invalid("amplitude ramp", "need at least two steps"));
    }
    let dx = cfg.dx();
    let dt = cfg.dt;
    let shape = SpdeConfig { initial_amplitude: 1.0, ..cfg.clone() }.initial_state();
    let states: Vec<HVector> = (0..=steps)
        .map(|k| {
            let a = start_amplitude
                * (end_amplitude / start_amplitude).powf(k as f64 / steps as f64);
            shape.scale(a)
        })
        .collect();

    let mut lap_values = Vec::with_capacity(steps);
    let mut lap_sizes = Vec::with_capacity(steps);
    let mut pow_values = Vec::with_capacity(steps);
    let mut h_times = Vec::with_capacity(steps);
    let mut h_jumps = Vec::with_capacity(steps);
    for k in 0..steps {
        let u = &states[k];
        let lap = p_laplacian(u, cfg.p1, dx)?;
        let pow = power_drift(u, cfg.p2)?;
        lap_sizes.push(flux_dual_size(u, cfg.p1, dx)?);
        // jump = prescribed increment minus the drift step
        let dh: Vec<f64> = (0..u.dim())
            .map(|j| {
                states[k + 1].as_slice()[j]
                    - u.as_slice()[j]
                    - dt * (lap.as_slice()[j] + pow.as_slice()[j])
            })
            .collect();
        lap_values.push(lap);
        pow_values.push(pow);
        if dh.iter().any(|x| *x != 0.0) {
            h_times.push((k + 1) as f64 * dt);
            h_jumps.push(HVector::new(dh)?);
        }
    }
    assemble_run(cfg, states, lap_values, lap_sizes, pow_values, h_times, h_jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::homogeneity_check;
    use crate::processes::ensemble_martingale_check;
    use crate::tol;

    fn noise_off(cfg: &SpdeConfig) -> SpdeConfig {
        SpdeConfig { wiener_sigma: 0.0, jump_rate: 0.0, ..cfg.clone() }
    }

    #[test]
    fn zero_noise_zero_initial_data_stays_at_rest() {
        let cfg = noise_off(&SpdeConfig {
            initial_amplitude: 0.0,
            grid_points: 8,
            horizon: 0.02,
            ..SpdeConfig::default()
        });
        let run = euler_run(&cfg).unwrap();
        assert_eq!(run.states.len(), 21);
        assert!(run.states.iter().all(|u| u.is_zero()));
        assert!(run.w1p_norms.iter().chain(&run.lp_norms).all(|n| *n == 0.0));
        let ledgers = run.ledger_sweep().unwrap();
        assert!(ledgers.iter().all(|l| l.lhs == 0.0 && l.residual == 0.0));
    }

    #[test]
    fn linear_case_matches_the_dense_matrix_recursion() {
        // p1 = p2 = 2 and no noise: u_{k+1} = (I + dt (L + I)) u_k with L
        // the second-difference matrix. Iterate the tridiagonal matrix by
        // hand on five nodes with unit spacing.
        let cfg = noise_off(&SpdeConfig {
            grid_points: 5,
            domain_length: 6.0, // dx = 1
            p2: 2.0,
            dt: 0.05,
            horizon: 0.5,
            ..SpdeConfig::default()
        });
        let run = euler_run(&cfg).unwrap();
        let dt = cfg.dt;
        let mut v = cfg.initial_state().as_slice().to_vec();
        for _ in 0..10 {
            let l: Vec<f64> = (0..5)
                .map(|j| {
                    let left = if j > 0 { v[j - 1] } else { 0.0 };
                    let right = if j < 4 { v[j + 1] } else { 0.0 };
                    left - 2.0 * v[j] + right
                })
                .collect();
            v = (0..5).map(|j| v[j] + dt * (l[j] + v[j])).collect();
        }
        let got = run.states.last().unwrap().as_slice();
        for (a, b) in got.iter().zip(&v) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn ledger_closes_at_every_step_with_both_noise_sources() {
        let cfg = SpdeConfig {
            grid_points: 8,
            horizon: 0.02,
            seed: 11,
            ..SpdeConfig::default()
        };
        let run = euler_run(&cfg).unwrap();
        let ledgers = run.ledger_sweep().unwrap();
        assert_eq!(ledgers.len(), 20);
        for l in &ledgers {
            assert!(l.passes(tol::RESIDUAL), "residual {} at t = {}", l.residual, l.t);
            assert!(l.term_qv > 0.0, "noise must contribute quadratic variation");
        }
    }

    #[test]
    fn composed_path_reproduces_the_euler_iterates() {
        let cfg = SpdeConfig { grid_points: 6, horizon: 0.01, seed: 3, ..SpdeConfig::default() };
        let run = euler_run(&cfg).unwrap();
        for (k, t) in run.step_times.iter().enumerate() {
            let v = run.scenario.v(*t);
            let u = &run.states[k];
            let defect = v.axpy(-1.0, u).max_abs();
            assert!(defect <= 1e-12 * (1.0 + u.max_abs()), "defect {defect} at step {k}");
        }
    }

    #[test]
    fn halving_dt_halves_the_correction_term_without_noise() {
        let coarse = noise_off(&SpdeConfig { horizon: 0.05, ..SpdeConfig::default() });
        let fine = SpdeConfig { dt: coarse.dt / 2.0, ..coarse.clone() };
        let at_end = |cfg: &SpdeConfig| {
            let run = euler_run(cfg).unwrap();
            let t = *run.step_times.last().unwrap();
            energy_ledger(&run.scenario, t).unwrap().term_correction
        };
        let ratio = at_end(&coarse) / at_end(&fine);
        assert!(
            ratio >= tol::SPDE_CORRECTION_FACTOR,
            "correction fell by {ratio}, expected nearly 2"
        );
    }

    #[test]
    fn unstable_step_size_is_refused_up_front() {
        // Unit domain on 32 nodes: dx^2/2 ≈ 4.6e-4 < dt, so the linearised
        // diffusion is outside the explicit-Euler stability region.
        let cfg = noise_off(&SpdeConfig { domain_length: 1.0, ..SpdeConfig::default() });
        match euler_run(&cfg) {
            Err(Error::SolverAbort { step: 0, why, .. }) => {
                assert!(why.contains("stability"), "unexpected reason: {why}")
            }
            other => panic!("expected a stability abort, got {other:?}"),
        }
    }

    #[test]
    fn blow_up_hits_the_norm_cap_and_reports_the_step() {
        // Pure cubic reaction from a large profile: explosive growth that
        // stays inside the stability guard for a few steps, then passes
        // the (deliberately low) cap.
        let cfg = noise_off(&SpdeConfig {
            grid_points: 4,
            domain_length: 40.0,
            p2: 3.0,
            dt: 1e-2,
            horizon: 10.0,
            initial_amplitude: 4.0,
            norm_cap: 50.0,
            ..SpdeConfig::default()
        });
        match euler_run(&cfg) {
            Err(Error::SolverAbort { step, why, norm }) => {
                assert!(step >= 1, "cap cannot trip before the first step");
                assert!(norm > 50.0 || why.contains("stability"), "norm {norm}: {why}");
            }
            other => panic!("expected a blow-up abort, got {other:?}"),
        }
    }

    #[test]
    fn runs_are_reproducible_from_the_seed_alone() {
        let cfg = SpdeConfig { grid_points: 6, horizon: 0.01, seed: 42, ..SpdeConfig::default() };
        let a = euler_run(&cfg).unwrap();
        let b = euler_run(&cfg).unwrap();
        assert_eq!(a.states.last().unwrap(), b.states.last().unwrap());
        let c = euler_run(&SpdeConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.states.last().unwrap(), c.states.last().unwrap());
    }

    #[test]
    fn noise_paths_pass_the_martingale_gate() {
        let base = SpdeConfig { grid_points: 6, horizon: 0.01, ..SpdeConfig::default() };
        let report = ensemble_martingale_check(
            |seed| Ok(euler_run(&SpdeConfig { seed, ..base.clone() })?.scenario.martingale().clone()),
            400,
            tol::ENSEMBLE_SIGMA,
        )
        .unwrap();
        assert!(report.passes(), "worst ratio {}", report.worst_ratio);
    }

    #[test]
    fn ramp_run_closes_its_ledger_and_scales_homogeneously() {
        let cfg = noise_off(&SpdeConfig { grid_points: 8, dt: 0.01, ..SpdeConfig::default() });
        let run = amplitude_ramp_run(&cfg, 0.1, 2.0, 40).unwrap();
        assert_eq!(run.states.len(), 41);
        for l in run.ledger_sweep().unwrap() {
            assert!(l.passes(tol::RESIDUAL), "residual {} at t = {}", l.residual, l.t);
        }
        // the ramp really ramps: strictly increasing norms on both tracks
        assert!(run.w1p_norms.windows(2).all(|w| w[0] < w[1]));
        assert!(run.lp_norms.windows(2).all(|w| w[0] < w[1]));
        let r = homogeneity_check(&run.scenario, 2.0, *run.step_times.last().unwrap()).unwrap();
        assert!(r.max_term_defect <= tol::HOMOGENEITY);
    }

    #[test]
    fn ramp_arguments_are_validated() {
        let cfg = SpdeConfig::default();
        assert!(amplitude_ramp_run(&cfg, 0.0, 1.0, 10).is_err());
        assert!(amplitude_ramp_run(&cfg, 1.0, 0.5, 10).is_err());
        assert!(amplitude_ramp_run(&cfg, 0.1, 1.0, 1).is_err());
    }
}
