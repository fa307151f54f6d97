//! Exactness checks built on the time change `β`: change-of-variables onto
//! the level axis, the unit-Lipschitz property of the composed level
//! profile, and squared-increment sums over time-changed dyadic grids whose
//! limit isolates the jump part of the pathwise bracket.

use crate::processes::driver::{IncreasingDriver, Window};
use crate::processes::step::StepFunction;

/// Both window variants of the change-of-variables identity
/// `∫_(0,t] x dA = ∫_0^{A(t)} x(β(r)) dr` (open windows use `A(t-)`),
/// each side computed by an independent routine.
#[derive(Debug, Clone, Copy)]
pub struct SubstitutionReport {
    pub closed_lhs: f64,
    pub closed_rhs: f64,
    pub open_lhs: f64,
    pub open_rhs: f64,
}

impl SubstitutionReport {
    pub fn max_error(&self) -> f64 {
        (self.closed_lhs - self.closed_rhs)
            .abs()
            .max((self.open_lhs - self.open_rhs).abs())
    }
}

pub fn substitution_check(a: &IncreasingDriver, x: &StepFunction, t: f64) -> SubstitutionReport {
    SubstitutionReport {
        closed_lhs: a.integrate_step(x, t, Window::ClosedRight),
        closed_rhs: r_axis_integral(a, x, a.eval(t)),
        open_lhs: a.integrate_step(x, t, Window::OpenRight),
        open_rhs: r_axis_integral(a, x, a.eval_left(t)),
    }
}

/// `∫_0^R x(β(r)) dr`, computed directly on the level axis.
///
/// `r ↦ x(β(r))` is piecewise constant between the images under `A` of the
/// driver's profile times and of the integrand's cuts, so splitting at
/// those images and sampling midpoints is exact for step integrands.
fn r_axis_integral(a: &IncreasingDriver, x: &StepFunction, r_max: f64) -> f64 {
    if r_max <= 0.0 {
        return 0.0;
    }
    let mut breaks = vec![0.0, r_max];
    for t in a.profile_times() {
        breaks.push(a.eval_left(t));
        breaks.push(a.eval(t));
    }
    for c in x.cuts() {
        breaks.push(a.eval_left(*c));
        breaks.push(a.eval(*c));
    }
    breaks.retain(|r| *r >= 0.0 && *r <= r_max);
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup();
    breaks
        .windows(2)
        .map(|w| (w[1] - w[0]) * x.eval(a.beta(0.5 * (w[0] + w[1]))))
        .sum()
}

/// Slack `(t - s) - (A(β(t)-) - A(β(s)))` for levels `0 <= s <= t`;
/// nonnegative because `A(β(s)) >= s` and `A(β(t)-) <= t`.
pub fn lipschitz_slack(a: &IncreasingDriver, s: f64, t: f64) -> f64 {
    let mass = a.total_mass();
    let bt = a.beta(t);
    let upper = if bt.is_finite() { a.eval_left(bt) } else { mass };
    let bs = a.beta(s);
    let lower = if bs.is_finite() { a.eval(bs) } else { mass };
    (t - s) - (upper - lower)
}

/// For each dyadic level `n = 0..=max_level`, the sum over the time-changed
/// grid `τ_j = β(j·2^-n)` of squared increments of `z(t) = ∫_(0,t] x dA`.
/// The grid always covers the driver's full mass.
pub fn squared_increment_sums(
    a: &IncreasingDriver,
    x: &StepFunction,
    max_level: u32,
    t: f64,
) -> Vec<f64> {
    (0..=max_level).map(|n| squared_increment_sum(a, x, n, t)).collect()
}

fn squared_increment_sum(a: &IncreasingDriver, x: &StepFunction, n: u32, t: f64) -> f64 {
    let step = f64::exp2(-f64::from(n));
    let mass = a.total_mass();
    let mut j_max = (mass / step).ceil() as usize;
    if (j_max as f64) * step < mass {
        j_max += 1;
    }
    j_max = j_max.max(1);
    let mut sum = 0.0;
    let mut prev_z = 0.0;
    for j in 1..=j_max {
        let tau = a.beta(j as f64 * step).min(t);
        let z = a.integrate_step(x, tau, Window::ClosedRight);
        sum += (z - prev_z) * (z - prev_z);
        prev_z = z;
    }
    sum
}

/// Limit of the squared-increment sums: the sum over driver jumps up to `t`
/// of the squared jump of `z`, i.e. `Σ x(s)² ΔA(s)²` with the integrand
/// evaluated at the jump time under its own convention.
pub fn increment_target(a: &IncreasingDriver, x: &StepFunction, t: f64) -> f64 {
    a.jump_times()
        .iter()
        .zip(a.jump_sizes())
        .take_while(|(s, _)| **s <= t)
        .map(|(s, da)| {
            let v = x.eval(*s);
            v * v * da * da
        })
        .sum()
}
