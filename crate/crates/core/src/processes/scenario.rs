//! A complete scenario: the family of spaces, the increasing driver `A`,
//! one dual-valued drift density per participating member space, and the
//! pivot-space jump path `h`. The composed path is
//!
//! ```text
//! v(t) = Σ_i ∫_(0,t] v_i*(s) dA(s) + h(t),
//! ```
//!
//! exact by construction, so every identity check downstream measures
//! floating-point defects only, never discretisation error.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::driver::{IncreasingDriver, Window};
use crate::processes::dual_step::DualStepProcess;
use crate::processes::martingale::MartingalePath;
use crate::processes::path::{HPath, ProjectedPath};
use crate::processes::quad::integrate_resolved;
use crate::processes::step::{Convention, StepPath};
use crate::spaces::{HVector, SpaceDescriptor, SpaceFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioSpec", into = "ScenarioSpec")]
pub struct Scenario {
    family: SpaceFamily,
    driver: IncreasingDriver,
    drifts: Vec<DualStepProcess>,
    martingale: MartingalePath,
    horizon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioSpec {
    family: SpaceFamily,
    driver: IncreasingDriver,
    drifts: Vec<DualStepProcess>,
    martingale: MartingalePath,
    horizon: f64,
}

impl TryFrom<ScenarioSpec> for Scenario {
    type Error = Error;
    fn try_from(s: ScenarioSpec) -> Result<Self> {
        Scenario::new(s.family, s.driver, s.drifts, s.martingale, s.horizon)
    }
}

impl From<Scenario> for ScenarioSpec {
    fn from(s: Scenario) -> ScenarioSpec {
        ScenarioSpec {
            family: s.family,
            driver: s.driver,
            drifts: s.drifts,
            martingale: s.martingale,
            horizon: s.horizon,
        }
    }
}

impl Scenario {
    pub fn new(
        family: SpaceFamily,
        driver: IncreasingDriver,
        drifts: Vec<DualStepProcess>,
        martingale: MartingalePath,
        horizon: f64,
    ) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::invalid("scenario", "horizon must be positive and finite"));
        }
        if martingale.dim() != family.dim() {
            return Err(Error::DimensionMismatch {
                expected: family.dim(),
                got: martingale.dim(),
            });
        }
        for d in &drifts {
            if d.dim() != family.dim() {
                return Err(Error::DimensionMismatch { expected: family.dim(), got: d.dim() });
            }
            family.space(d.space_index())?;
            d.check_eta(&family)?;
        }
        let s = Scenario { family, driver, drifts, martingale, horizon };
        if let Some(last) = s.event_times().last() {
            if *last > horizon {
                return Err(Error::invalid("scenario", format!("event at {last} past horizon")));
            }
        }
        Ok(s)
    }

    pub fn family(&self) -> &SpaceFamily {
        &self.family
    }

    pub fn driver(&self) -> &IncreasingDriver {
        &self.driver
    }

    pub fn drifts(&self) -> &[DualStepProcess] {
        &self.drifts
    }

    pub fn martingale(&self) -> &MartingalePath {
        &self.martingale
    }

    /// Final time of the scenario's window `[0, T]`; every event time is at
    /// or before it, and ledger checks refuse probes past it.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// Combined drift density `v*(t) = Σ_i v_i*(t)`.
    pub fn drift_sum_at(&self, t: f64) -> HVector {
        let mut out = HVector::zeros(self.dim());
        for d in &self.drifts {
            out = out.axpy(1.0, d.eval(t));
        }
        out
    }

    /// Accumulated drift `z(t) = Σ_i ∫_(0,t] v_i* dA`.
    pub fn z(&self, t: f64) -> HVector {
        self.z_window(t, Window::ClosedRight)
    }

    /// Left limit `z(t-)`.
    pub fn z_left(&self, t: f64) -> HVector {
        self.z_window(t, Window::OpenRight)
    }

    fn z_window(&self, t: f64, window: Window) -> HVector {
        let mut out = HVector::zeros(self.dim());
        for d in &self.drifts {
            out = out.axpy(1.0, &self.driver.integrate_step_path(d.values(), t, window));
        }
        out
    }

    /// The composed path `v(t) = z(t) + h(t)`.
    pub fn v(&self, t: f64) -> HVector {
        self.z(t).axpy(1.0, &self.martingale.eval(t))
    }

    /// Left limit `v(t-)`.
    pub fn v_left(&self, t: f64) -> HVector {
        self.z_left(t).axpy(1.0, &self.martingale.eval_left(t))
    }

    /// Sorted union of every time the scenario can jump or change slope:
    /// driver atoms and density breakpoints, drift cuts, path jump times.
    pub fn event_times(&self) -> Vec<f64> {
        let mut ts = self.driver.jump_times().to_vec();
        for seg in self.driver.density() {
            ts.push(seg.start);
            ts.push(seg.end);
        }
        ts.extend_from_slice(self.martingale.times());
        for d in &self.drifts {
            ts.extend_from_slice(d.values().cuts());
        }
        ts.retain(|t| *t > 0.0);
        ts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        ts.dedup();
        ts
    }

    /// The composed path as a [`HPath`] view.
    pub fn path(&self) -> ScenarioPath<'_> {
        ScenarioPath { scenario: self }
    }

    /// The scenario with driver and jump path scaled by `c > 0` and the
    /// drift densities untouched: every ledger term then scales by `c²`.
    pub fn scaled(&self, c: f64) -> Result<Scenario> {
        Ok(Scenario {
            family: self.family.clone(),
            driver: self.driver.scale(c)?,
            drifts: self.drifts.clone(),
            martingale: self.martingale.scale(c),
            horizon: self.horizon,
        })
    }

    /// The nondecreasing regularity process
    ///
    /// ```text
    /// r(t) = |h(0)| + A(t) + Σ_i ‖v‖_{L_{p_i}(dA; V_i)}(t) + Σ_i Q_i(t)
    ///        + Σ_i Σ_{k=1..d} 2^(-c_k) ‖Π_k h‖_{L_{p_i}(dA; V_i)}(t)
    /// ```
    ///
    /// with `Q_i` the accumulated drift sizes and `c_k` the family's basis
    /// constants.
    pub fn regularity(&self, t: f64) -> Result<f64> {
        let fam = &self.family;
        let mut r = fam.h_norm_sq(self.martingale.initial())?.sqrt() + self.driver.eval(t);
        let vpath = self.path();
        let kinks = vpath.kinks();
        for i in 0..fam.num_spaces() {
            r += self.lp_da_norm(&vpath, &kinks, i, t)?;
        }
        for d in &self.drifts {
            r += d.integrated_size(fam, &self.driver, t)?;
        }
        let h_kinks = self.martingale.times().to_vec();
        for i in 0..fam.num_spaces() {
            for k in 1..=fam.dim() {
                let proj = ProjectedPath::new(&self.martingale, fam, k)?;
                let ck = fam.basis_constants()[k - 1];
                r += f64::exp2(-ck) * self.lp_da_norm(&proj, &h_kinks, i, t)?;
            }
        }
        Ok(r)
    }

    /// `(∫_(0,t] ‖v(s)‖_{V_i}^{p_i} dA)^{1/p_i}` for the composed path —
    /// the size against which Hölder bounds the drift pairing.
    pub fn composed_lp_norm(&self, i: usize, t: f64) -> Result<f64> {
        let path = self.path();
        let kinks = path.kinks();
        self.lp_da_norm(&path, &kinks, i, t)
    }

    /// `(∫_(0,t] ‖p(s)‖_{V_i}^{p_i} dA)^{1/p_i}`.
    fn lp_da_norm<P: HPath>(&self, path: &P, kinks: &[f64], i: usize, t: f64) -> Result<f64> {
        self.family.check_dim(&path.eval(0.0))?;
        let p = self.family.space(i)?.p;
        let raw = integrate_resolved(
            &self.driver,
            kinks,
            |s| {
                self.family
                    .v_norm(&path.eval(s), i)
                    .expect("dimension checked above")
                    .powf(p)
            },
            t,
            Window::ClosedRight,
        );
        Ok(raw.powf(1.0 / p))
    }
}

/// [`HPath`] view of a scenario's composed path.
pub struct ScenarioPath<'a> {
    scenario: &'a Scenario,
}

impl HPath for ScenarioPath<'_> {
    fn dim(&self) -> usize {
        self.scenario.dim()
    }

    fn eval(&self, t: f64) -> HVector {
        self.scenario.v(t)
    }

    fn eval_left(&self, t: f64) -> HVector {
        self.scenario.v_left(t)
    }

    fn kinks(&self) -> Vec<f64> {
        self.scenario.event_times()
    }
}

/// Shape parameters for randomly generated pure-jump scenarios.
///
/// Jump sizes are drawn from `[0.25/K, 0.75/K]` for `K` jumps, so the total
/// mass stays at or below `0.75` (partition hierarchies always apply) and
/// the smallest jump is separated by the dyadic grid within a few levels.
/// Path jumps and drift cuts sit on the driver's event grid, so the time
/// change never lands on a time carrying zero driver mass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomScenarioSpec {
    /// Number of driver jumps (clamped to `1..=50`).
    pub jumps: usize,
    /// Jump times are drawn uniformly from `(0, horizon)`.
    pub horizon: f64,
    /// Probability that each driver jump time also carries a path jump.
    pub h_jump_probability: f64,
    /// Amplitude of the initial value and path jumps.
    pub h_scale: f64,
    /// Number of drift pieces per participating space (cuts are a subset
    /// of the driver's jump times).
    pub drift_pieces: usize,
    /// Amplitude of drift density entries.
    pub drift_scale: f64,
}

impl Default for RandomScenarioSpec {
    fn default() -> Self {
        RandomScenarioSpec {
            jumps: 20,
            horizon: 1.0,
            h_jump_probability: 0.5,
            h_scale: 1.0,
            drift_pieces: 4,
            drift_scale: 1.0,
        }
    }
}

/// Deterministic family generator for sweep drivers: `1..=max_spaces`
/// integral-norm members over a grid of dimension `2..=4`, exponents drawn
/// from `exponents`, node and pivot weights drawn from `[0.5, 2]`. The same
/// `(exponents, max_spaces, seed)` always produces the same family.
pub fn random_family(exponents: &[f64], max_spaces: usize, seed: u64) -> Result<SpaceFamily> {
    if exponents.is_empty() {
        return Err(Error::invalid("family spec", "need at least one exponent"));
    }
    if max_spaces == 0 {
        return Err(Error::invalid("family spec", "need at least one member space"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(2..=4usize);
    let m = rng.random_range(1..=max_spaces);
    let h_weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..=2.0)).collect();
    let spaces = (0..m)
        .map(|_| {
            let p = exponents[rng.random_range(0..exponents.len())];
            let weights = (0..d).map(|_| rng.random_range(0.5..=2.0)).collect();
            SpaceDescriptor::lp(p, weights)
        })
        .collect();
    SpaceFamily::new(h_weights, spaces)
}

/// Deterministic scenario generator: the same `(family, spec, seed)` always
/// produces the same scenario.
pub fn random_scenario(
    family: &SpaceFamily,
    spec: &RandomScenarioSpec,
    seed: u64,
) -> Result<Scenario> {
    if !(spec.horizon.is_finite() && spec.horizon > 0.0) {
        return Err(Error::invalid("scenario spec", "horizon must be positive and finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.jumps.clamp(1, 50);
    let mut times: Vec<f64> = (0..k)
        .map(|_| rng.random_range(0.05 * spec.horizon..spec.horizon))
        .collect();
    times.sort_by(|p, q| p.partial_cmp(q).unwrap());
    times.dedup();
    let kk = times.len();
    let sizes: Vec<f64> =
        (0..kk).map(|_| rng.random_range(0.25 / kk as f64..0.75 / kk as f64)).collect();
    let driver = IncreasingDriver::new(times.clone(), sizes, Vec::new())?;

    let d = family.dim();
    let rand_vec =
        |rng: &mut ChaCha8Rng, scale: f64| -> HVector {
            HVector::new((0..d).map(|_| rng.random_range(-scale..=scale)).collect())
                .expect("bounded entries are finite")
        };

    let mut drifts = Vec::with_capacity(family.num_spaces());
    for i in 0..family.num_spaces() {
        let pieces = spec.drift_pieces.clamp(1, kk);
        let mut cut_idx = rand::seq::index::sample(&mut rng, kk, pieces - 1).into_vec();
        cut_idx.sort_unstable();
        let cuts: Vec<f64> = cut_idx.iter().map(|j| times[*j]).collect();
        let values: Vec<HVector> =
            (0..cuts.len() + 1).map(|_| rand_vec(&mut rng, spec.drift_scale)).collect();
        let path = StepPath::new(cuts, values, Convention::LeftContinuous)?;
        drifts.push(DualStepProcess::with_default_eta(family, i, path)?);
    }

    let initial = rand_vec(&mut rng, spec.h_scale);
    let mut h_times = Vec::new();
    let mut h_jumps = Vec::new();
    for t in &times {
        if rng.random_bool(spec.h_jump_probability.clamp(0.0, 1.0)) {
            h_times.push(*t);
            h_jumps.push(rand_vec(&mut rng, spec.h_scale));
        }
    }
    let martingale = MartingalePath::new(initial, h_times, h_jumps)?;
    Scenario::new(family.clone(), driver, drifts, martingale, spec.horizon)
}
