//! The increasing driver `A`: a nondecreasing cadlag process with `A(0)=0`,
//! finitely many jumps and an optional piecewise-constant density, plus its
//! right-inverse time change
//! `β(r) = inf { t >= 0 : A(t) >= r }` and exact Stieltjes integration of
//! step integrands against `dA`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::step::{StepFunction, StepPath};
use crate::spaces::HVector;

/// A stretch `[start, end)` on which `A` grows at constant `rate >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySegment {
    pub start: f64,
    pub end: f64,
    pub rate: f64,
}

/// Integration window against `dA` anchored at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// `(0, t]` — includes the atom at `t`.
    ClosedRight,
    /// `(0, t)` — excludes the atom at `t`.
    OpenRight,
}

/// Nondecreasing cadlag driver with `A(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DriverSpec", into = "DriverSpec")]
pub struct IncreasingDriver {
    jump_times: Vec<f64>,
    jump_sizes: Vec<f64>,
    density: Vec<DensitySegment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DriverSpec {
    jump_times: Vec<f64>,
    jump_sizes: Vec<f64>,
    #[serde(default)]
    density: Vec<DensitySegment>,
}

impl TryFrom<DriverSpec> for IncreasingDriver {
    type Error = Error;
    fn try_from(s: DriverSpec) -> Result<Self> {
        IncreasingDriver::new(s.jump_times, s.jump_sizes, s.density)
    }
}

impl From<IncreasingDriver> for DriverSpec {
    fn from(d: IncreasingDriver) -> DriverSpec {
        DriverSpec { jump_times: d.jump_times, jump_sizes: d.jump_sizes, density: d.density }
    }
}

impl IncreasingDriver {
    pub fn new(
        jump_times: Vec<f64>,
        jump_sizes: Vec<f64>,
        density: Vec<DensitySegment>,
    ) -> Result<Self> {
        if jump_times.len() != jump_sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: jump_times.len(),
                got: jump_sizes.len(),
            });
        }
        if jump_times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::invalid("driver", "jump times must be finite and positive"));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("driver", "jump times must be strictly increasing"));
        }
        if jump_sizes.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::invalid("driver", "jump sizes must be strictly positive"));
        }
        for seg in &density {
            if !seg.start.is_finite() || !seg.end.is_finite() || !seg.rate.is_finite() {
                return Err(Error::NonFinite { context: "density segment" });
            }
            if seg.start < 0.0 || seg.end <= seg.start || seg.rate < 0.0 {
                return Err(Error::invalid(
                    "driver",
                    "density segments need 0 <= start < end and rate >= 0",
                ));
            }
        }
        if density.windows(2).any(|w| w[0].end > w[1].start) {
            return Err(Error::invalid("driver", "density segments must be sorted and disjoint"));
        }
        Ok(IncreasingDriver { jump_times, jump_sizes, density })
    }

    /// Driver with jumps only.
    pub fn pure_jump(jumps: Vec<(f64, f64)>) -> Result<Self> {
        let (times, sizes) = jumps.into_iter().unzip();
        IncreasingDriver::new(times, sizes, Vec::new())
    }

    /// Unit-rate density on `[0, 1]`, no jumps.
    pub fn unit_density() -> Self {
        IncreasingDriver {
            jump_times: Vec::new(),
            jump_sizes: Vec::new(),
            density: vec![DensitySegment { start: 0.0, end: 1.0, rate: 1.0 }],
        }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump_sizes(&self) -> &[f64] {
        &self.jump_sizes
    }

    pub fn density(&self) -> &[DensitySegment] {
        &self.density
    }

    pub fn is_pure_jump(&self) -> bool {
        self.density.iter().all(|s| s.rate == 0.0)
    }

    /// Jump size `ΔA(t)` (zero off the jump set).
    pub fn jump_at(&self, t: f64) -> f64 {
        match self.jump_times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(k) => self.jump_sizes[k],
            Err(_) => 0.0,
        }
    }

    fn density_mass_up_to(&self, t: f64) -> f64 {
        self.density
            .iter()
            .map(|seg| {
                let upper = t.min(seg.end);
                if upper > seg.start {
                    (upper - seg.start) * seg.rate
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `A(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let jumps: f64 = self
            .jump_times
            .iter()
            .zip(&self.jump_sizes)
            .take_while(|(tk, _)| **tk <= t)
            .map(|(_, s)| s)
            .sum();
        jumps + self.density_mass_up_to(t)
    }

    /// Left limit `A(t-)`.
    pub fn eval_left(&self, t: f64) -> f64 {
        let jumps: f64 = self
            .jump_times
            .iter()
            .zip(&self.jump_sizes)
            .take_while(|(tk, _)| **tk < t)
            .map(|(_, s)| s)
            .sum();
        jumps + self.density_mass_up_to(t)
    }

    /// The driver scaled by `c > 0`: every jump size and density rate
    /// multiplied by `c`, event times untouched.
    pub fn scale(&self, c: f64) -> Result<IncreasingDriver> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::NonPositiveScale { n: c });
        }
        Ok(IncreasingDriver {
            jump_times: self.jump_times.clone(),
            jump_sizes: self.jump_sizes.iter().map(|s| s * c).collect(),
            density: self
                .density
                .iter()
                .map(|s| DensitySegment { rate: s.rate * c, ..*s })
                .collect(),
        })
    }

    /// `A(∞)`: total mass.
    pub fn total_mass(&self) -> f64 {
        self.jump_sizes.iter().sum::<f64>()
            + self.density.iter().map(|s| (s.end - s.start) * s.rate).sum::<f64>()
    }

    /// Merged, sorted event times: jump times plus density breakpoints.
    /// The level profile of `A` is piecewise linear between them.
    pub(crate) fn profile_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.jump_times.clone();
        for seg in &self.density {
            ts.push(seg.start);
            ts.push(seg.end);
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    }

    fn rate_at(&self, t: f64) -> f64 {
        self.density
            .iter()
            .find(|seg| seg.start <= t && t < seg.end)
            .map(|seg| seg.rate)
            .unwrap_or(0.0)
    }

    /// Time change `β(r) = inf { t >= 0 : A(t) >= r }`, with `+∞` when the
    /// level `r` is never reached. `β(r) = 0` for `r <= 0`.
    pub fn beta(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r > self.total_mass() {
            return f64::INFINITY;
        }
        let times = self.profile_times();
        let mut level = 0.0;
        let mut prev = 0.0;
        for t in times {
            // Continuous growth on (prev, t).
            let rate = self.rate_at(0.5 * (prev + t));
            let gained = rate * (t - prev);
            if level + gained >= r && rate > 0.0 {
                return prev + (r - level) / rate;
            }
            level += gained;
            // Atom at t.
            let da = self.jump_at(t);
            if level + da >= r {
                return t;
            }
            level += da;
            prev = t;
        }
        // r <= total mass, so a crossing must have been found.
        unreachable!("time change scan missed level {r}");
    }

    /// Exact `∫ f dA` over the window at `t` for a scalar step integrand.
    pub fn integrate_step(&self, f: &StepFunction, t: f64, window: Window) -> f64 {
        let mut acc = 0.0;
        for (tk, da) in self.jump_times.iter().zip(&self.jump_sizes) {
            if in_window(*tk, t, window) {
                acc += f.eval(*tk) * da;
            } else if *tk > t {
                break;
            }
        }
        acc + self.density_integral(f.cuts(), |u| f.eval(u), t)
    }

    /// Exact `∫ f dA` for a vector step integrand.
    pub fn integrate_step_path(&self, f: &StepPath, t: f64, window: Window) -> HVector {
        let mut acc = HVector::zeros(f.dim());
        for (tk, da) in self.jump_times.iter().zip(&self.jump_sizes) {
            if in_window(*tk, t, window) {
                acc = acc.axpy(*da, f.eval(*tk));
            } else if *tk > t {
                break;
            }
        }
        for j in 0..f.dim() {
            let c = self.density_integral(f.cuts(), |u| f.eval(u)[j], t);
            if c != 0.0 {
                acc = acc.axpy(c, &HVector::indicator(f.dim(), j));
            }
        }
        acc
    }

    /// `∫_(0,t) eval(u) ρ(u) du` with the integrand constant between
    /// consecutive `cuts` (exact: pieces are split at every cut). The
    /// density never carries atoms, so open and closed windows agree.
    fn density_integral(&self, cuts: &[f64], eval: impl Fn(f64) -> f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for seg in &self.density {
            if seg.rate == 0.0 {
                continue;
            }
            let hi = seg.end.min(t);
            if hi <= seg.start {
                continue;
            }
            let mut lo = seg.start;
            let from = cuts.partition_point(|c| *c <= lo);
            for c in &cuts[from..] {
                if *c >= hi {
                    break;
                }
                acc += seg.rate * (c - lo) * eval(0.5 * (lo + c));
                lo = *c;
            }
            acc += seg.rate * (hi - lo) * eval(0.5 * (lo + hi));
        }
        acc
    }
}

fn in_window(tk: f64, t: f64, window: Window) -> bool {
    match window {
        Window::ClosedRight => tk <= t,
        Window::OpenRight => tk < t,
    }
}
