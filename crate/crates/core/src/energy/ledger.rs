//! The energy ledger: both sides of the identity
//!
//! ```text
//! |v(t)|² = |h(0)|² + 2 Σ_i ∫_(0,t] <v_i*(s), v(s)> dA(s)
//!         + 2 ∫_(0,t] (v(s−), dh(s))
//!         − ∫_(0,t] |v*(s)|² ΔA(s) dA(s) + [h]_t
//! ```
//!
//! evaluated term by term as exact finite sums, with the residual as the
//! single quality number. Every integral is a sum over driver atoms plus an
//! exact quadrature of the piecewise-affine density part, so the residual
//! measures rounding, not discretisation.
//!
//! Alongside the ledger live the pointwise companions: the cadlag
//! modification (the step path that realises `v` between events), the weak
//! jump relation `Δ(v − h)(t) = ΔA(t) Σ_i v_i*(t)`, the scalar pivot-space
//! identity for pure-jump paths, and the quadratic scaling homogeneity of
//! every ledger term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::driver::Window;
use crate::processes::martingale::MartingalePath;
use crate::processes::quad::integrate_resolved;
use crate::processes::scenario::Scenario;
use crate::processes::step::{Convention, StepPath};
use crate::spaces::{HVector, SpaceFamily};

/// One row of the energy identity at a fixed time: left-hand side, the five
/// right-hand terms, and the residual `lhs − (term_h0 + term_drift +
/// term_stoch − term_correction + term_qv)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    /// Evaluation time.
    pub t: f64,
    /// `|v(t)|²` in the pivot space.
    pub lhs: f64,
    /// `|h(0)|²`.
    pub term_h0: f64,
    /// `2 Σ_i ∫_(0,t] <v_i*(s), v(s)> dA(s)` with the cadlag integrand.
    pub term_drift: f64,
    /// `2 ∫_(0,t] (v(s−), dh(s))`, a finite sum over path jumps.
    pub term_stoch: f64,
    /// `∫_(0,t] |v*(s)|² ΔA(s) dA(s)`, entered with a minus sign.
    pub term_correction: f64,
    /// Quadratic variation `[h]_t`.
    pub term_qv: f64,
    /// `lhs − rhs`; the identity says this is zero.
    pub residual: f64,
}

impl EnergyLedger {
    /// Residual gate used everywhere: `|residual| <= tol * (1 + lhs)`.
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.abs() <= tol * (1.0 + self.lhs.abs())
    }
}

/// Evaluate every ledger term at `t`. Probes past the scenario horizon are
/// refused: the scenario is undefined there.
pub fn energy_ledger(s: &Scenario, t: f64) -> Result<EnergyLedger> {
    if t.is_nan() || t > s.horizon() {
        return Err(Error::invalid("ledger probe", format!("t = {t} past the horizon")));
    }
    let fam = s.family();
    let a = s.driver();
    let events = s.event_times();

    let lhs = fam.h_norm_sq(&s.v(t))?;
    let term_h0 = fam.h_norm_sq(s.martingale().initial())?;

    // Drift pairing: at atoms the integrand carries the cadlag value v(s);
    // on density pieces v is affine in s and v_i* constant, so the
    // 16-point rule is exact once split at event times.
    let mut term_drift = 0.0;
    for d in s.drifts() {
        term_drift += 2.0
            * integrate_resolved(
                a,
                &events,
                |u| {
                    fam.duality_pair(d.eval(u), &s.v(u))
                        .expect("scenario dimensions are validated at construction")
                },
                t,
                Window::ClosedRight,
            );
    }

    // Pure-jump h: the stochastic integral is the sum over path jumps of
    // the pairing with the left limit of v.
    let mut term_stoch = 0.0;
    for (u, dh) in s.martingale().times().iter().zip(s.martingale().jumps()) {
        if *u > t {
            break;
        }
        term_stoch += 2.0 * fam.h_inner(&s.v_left(*u), dh)?;
    }

    // ΔA vanishes on the density part, so only atoms contribute.
    let mut term_correction = 0.0;
    for (u, da) in a.jump_times().iter().zip(a.jump_sizes()) {
        if *u > t {
            break;
        }
        term_correction += fam.h_norm_sq(&s.drift_sum_at(*u))? * da * da;
    }

    let term_qv = s.martingale().quadratic_variation(fam, t)?;

    let residual = lhs - (term_h0 + term_drift + term_stoch - term_correction + term_qv);
    Ok(EnergyLedger { t, lhs, term_h0, term_drift, term_stoch, term_correction, term_qv, residual })
}

/// The scenario's path as an explicit right-continuous step path with cuts
/// at the event times. For pure-jump drivers this *is* `v`; left limits and
/// right continuity come for free from the step representation.
pub fn cadlag_modification(s: &Scenario) -> Result<StepPath> {
    let events = s.event_times();
    let mut values = Vec::with_capacity(events.len() + 1);
    values.push(s.v(0.0));
    for t in &events {
        values.push(s.v(*t));
    }
    StepPath::new(events, values, Convention::RightContinuous)
}

/// Both sides of the jump relation `Δ(v − h)(t) = ΔA(t) Σ_i v_i*(t)` at an
/// event time. Other probe times are refused — between events there is no
/// jump to compare.
pub fn weak_jump_check(s: &Scenario, t: f64) -> Result<(HVector, HVector)> {
    if !s.event_times().contains(&t) {
        return Err(Error::NotAnEventTime { t });
    }
    let lhs = s.z(t).axpy(-1.0, &s.z_left(t));
    let rhs = s.drift_sum_at(t).scale(s.driver().jump_at(t));
    Ok((lhs, rhs))
}

/// Both sides of the pivot-space identity for a pure-jump path:
/// `|h(t)|² = |h(0)|² + 2 Σ_{s≤t} (h(s−), Δh(s)) + [h]_t`.
pub fn hilbert_ito_check(family: &SpaceFamily, h: &MartingalePath, t: f64) -> Result<(f64, f64)> {
    let lhs = family.h_norm_sq(&h.eval(t))?;
    let mut rhs = family.h_norm_sq(h.initial())?;
    for (u, dh) in h.times().iter().zip(h.jumps()) {
        if *u > t {
            break;
        }
        rhs += 2.0 * family.h_inner(&h.eval_left(*u), dh)?;
    }
    rhs += h.quadratic_variation(family, t)?;
    Ok((lhs, rhs))
}

/// Ledgers of a scenario and of its `1/n`-scaled reduction, with the worst
/// relative defect of the per-term quadratic scaling law.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub base: EnergyLedger,
    pub scaled: EnergyLedger,
    /// `max_terms |scaled_term − base_term / n²| / (1 + |base_term / n²|)`.
    pub max_term_defect: f64,
}

/// Scaling the driver and the path by `1/n` (drift densities untouched)
/// multiplies every ledger term by exactly `1/n²`. Returns both ledgers at
/// `t` and the worst per-term defect of that law.
pub fn homogeneity_check(s: &Scenario, n: f64, t: f64) -> Result<HomogeneityReport> {
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::NonPositiveScale { n });
    }
    let base = energy_ledger(s, t)?;
    let scaled = energy_ledger(&s.scaled(1.0 / n)?, t)?;
    let pairs = [
        (scaled.lhs, base.lhs),
        (scaled.term_h0, base.term_h0),
        (scaled.term_drift, base.term_drift),
        (scaled.term_stoch, base.term_stoch),
        (scaled.term_correction, base.term_correction),
        (scaled.term_qv, base.term_qv),
    ];
    let mut max_term_defect = 0.0f64;
    for (got, base_term) in pairs {
        let want = base_term / (n * n);
        max_term_defect = max_term_defect.max((got - want).abs() / (1.0 + want.abs()));
    }
    Ok(HomogeneityReport { base, scaled, max_term_defect })
}
