//! Drift densities: dual-valued step processes `v_i*` attached to one
//! member space, together with their size processes `η_i >= ‖v_i*‖_{V_i*}`.
//!
//! Both the density and its size are left-continuous step objects, so every
//! `dA`-integral against them is computed exactly by the Stieltjes engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::driver::{IncreasingDriver, Window};
use crate::processes::step::{Convention, StepFunction, StepPath};
use crate::spaces::{
    dual_norm_lp, dual_norm_probe, dual_norm_variational, HVector, SpaceFamily, SpaceKind,
};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DualStepSpec", into = "DualStepSpec")]
pub struct DualStepProcess {
    space_index: usize,
    values: StepPath,
    etas: StepFunction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DualStepSpec {
    space_index: usize,
    values: StepPath,
    etas: StepFunction,
}

impl TryFrom<DualStepSpec> for DualStepProcess {
    type Error = Error;
    fn try_from(s: DualStepSpec) -> Result<Self> {
        DualStepProcess::raw(s.space_index, s.values, s.etas)
    }
}

impl From<DualStepProcess> for DualStepSpec {
    fn from(p: DualStepProcess) -> DualStepSpec {
        DualStepSpec { space_index: p.space_index, values: p.values, etas: p.etas }
    }
}

impl DualStepProcess {
    /// Shape-only construction: left-continuous pieces, nonnegative sizes.
    /// The size-domination check against a concrete family is separate
    /// ([`DualStepProcess::check_eta`]) and runs whenever the process is
    /// attached to a scenario.
    pub fn raw(space_index: usize, values: StepPath, etas: StepFunction) -> Result<Self> {
        if values.convention() != Convention::LeftContinuous
            || etas.convention() != Convention::LeftContinuous
        {
            return Err(Error::invalid("drift density", "pieces must be left-continuous"));
        }
        if etas.values().iter().any(|e| *e < 0.0) {
            return Err(Error::invalid("drift density", "size process must be nonnegative"));
        }
        Ok(DualStepProcess { space_index, values, etas })
    }

    /// Construct and verify `η(t) >= ‖v*(t)‖_{V_i*}` against `family`.
    pub fn new(
        family: &SpaceFamily,
        space_index: usize,
        values: StepPath,
        etas: StepFunction,
    ) -> Result<Self> {
        let p = DualStepProcess::raw(space_index, values, etas)?;
        p.check_eta(family)?;
        Ok(p)
    }

    /// Construct with the canonical size process: the exact dual norm for
    /// integral-norm members, the pivot-norm embedding bound
    /// `C_i ‖v*(t)‖_H` for gradient-norm members.
    pub fn with_default_eta(
        family: &SpaceFamily,
        space_index: usize,
        values: StepPath,
    ) -> Result<Self> {
        family.check_dim(values.values().first().expect("step paths are never empty"))?;
        let s = family.space(space_index)?;
        let etas = match s.kind {
            SpaceKind::Lp => {
                let mut out = Vec::with_capacity(values.values().len());
                for v in values.values() {
                    out.push(dual_norm_lp(family, v, space_index)?);
                }
                StepFunction::new(values.cuts().to_vec(), out, Convention::LeftContinuous)?
            }
            SpaceKind::W1p => {
                let c = family.node_embedding_constant(space_index)?;
                let mut out = Vec::with_capacity(values.values().len());
                for v in values.values() {
                    out.push(c * family.h_norm_sq(v)?.sqrt());
                }
                StepFunction::new(values.cuts().to_vec(), out, Convention::LeftContinuous)?
            }
        };
        DualStepProcess::raw(space_index, values, etas)
    }

    /// Verify the size process dominates the dual norm on every piece.
    ///
    /// Integral-norm members use the exact dual norm. Gradient-norm members
    /// have no closed dual here, so the check probes a lower bound — the
    /// box search where the dimension allows it, the finite probe set
    /// otherwise: it can miss an undersized `η` but never falsely rejects.
    pub fn check_eta(&self, family: &SpaceFamily) -> Result<()> {
        let s = family.space(self.space_index)?;
        let mut norms = Vec::with_capacity(self.values.values().len());
        for v in self.values.values() {
            family.check_dim(v)?;
            let n = match s.kind {
                SpaceKind::Lp => dual_norm_lp(family, v, self.space_index)?,
                // The box search is exhaustive in the grid dimension; when
                // its budget cannot cover the sweep (large grids), fall
                // back to the finite probe set. Both are lower bounds, so
                // the check stays sound either way.
                SpaceKind::W1p => match dual_norm_variational(
                    family,
                    v,
                    self.space_index,
                    tol::DUAL_SEARCH_RESOLUTION,
                ) {
                    Err(Error::SearchBudgetExceeded { .. }) => {
                        dual_norm_probe(family, v, self.space_index)?
                    }
                    other => other?,
                },
            };
            norms.push(n);
        }
        let norm_step =
            StepFunction::new(self.values.cuts().to_vec(), norms, Convention::LeftContinuous)?;
        let slack = norm_step.map2(&self.etas, |n, e| e - n + tol::ETA_SLACK);
        if let Some(bad) = slack.values().iter().position(|d| *d < 0.0) {
            return Err(Error::invalid(
                "drift density",
                format!(
                    "size process falls below the dual norm by {:.3e} on piece {bad}",
                    -slack.values()[bad]
                ),
            ));
        }
        Ok(())
    }

    pub fn space_index(&self) -> usize {
        self.space_index
    }

    pub fn values(&self) -> &StepPath {
        &self.values
    }

    pub fn etas(&self) -> &StepFunction {
        &self.etas
    }

    pub fn eval(&self, t: f64) -> &HVector {
        self.values.eval(t)
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    /// Scale the density (and its size) by `c >= 0`.
    pub fn scale(&self, c: f64) -> DualStepProcess {
        DualStepProcess {
            space_index: self.space_index,
            values: StepPath::new(
                self.values.cuts().to_vec(),
                self.values.values().iter().map(|v| v.scale(c)).collect(),
                Convention::LeftContinuous,
            )
            .expect("scaling preserves validity"),
            etas: self.etas.map(|e| e * c),
        }
    }

    /// The accumulated size `Q_i(t)`: `(∫_(0,t] η^{q_i} dA)^{1/q_i}` for the
    /// conjugate exponent `q_i` of the member space, or the `dA`-essential
    /// supremum of `η` over `(0,t]` when `q_i = ∞`.
    pub fn integrated_size(
        &self,
        family: &SpaceFamily,
        a: &IncreasingDriver,
        t: f64,
    ) -> Result<f64> {
        let q = family.space(self.space_index)?.q();
        if q.is_infinite() {
            return Ok(self.ess_sup(a, t));
        }
        let powed = self.etas.map(|e| e.powf(q));
        Ok(a.integrate_step(&powed, t, Window::ClosedRight).powf(1.0 / q))
    }

    /// `dA`-essential supremum of `η` over `(0, t]`: the max over atoms in
    /// the window and over positive-rate density stretches.
    fn ess_sup(&self, a: &IncreasingDriver, t: f64) -> f64 {
        let mut m = 0.0f64;
        for tk in a.jump_times() {
            if *tk > t {
                break;
            }
            m = m.max(self.etas.eval(*tk));
        }
        for seg in a.density() {
            if seg.rate == 0.0 {
                continue;
            }
            let hi = seg.end.min(t);
            if hi <= seg.start {
                continue;
            }
            let mut lo = seg.start;
            let from = self.etas.cuts().partition_point(|c| *c <= lo);
            for c in &self.etas.cuts()[from..] {
                if *c >= hi {
                    break;
                }
                m = m.max(self.etas.eval(0.5 * (lo + c)));
                lo = *c;
            }
            m = m.max(self.etas.eval(0.5 * (lo + hi)));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::driver::DensitySegment;
    use crate::spaces::{DifferenceStencil, SpaceDescriptor};

    fn self_dual_family() -> SpaceFamily {
        SpaceFamily::new(vec![1.0, 1.0], vec![SpaceDescriptor::lp(2.0, vec![1.0, 1.0])]).unwrap()
    }

    #[test]
    fn default_eta_is_the_exact_dual_norm_for_integral_members() {
        let fam = self_dual_family();
        let values = StepPath::constant(HVector::new(vec![3.0, 4.0]).unwrap());
        let p = DualStepProcess::with_default_eta(&fam, 0, values).unwrap();
        assert_eq!(p.etas().values(), &[5.0]);
        assert!(p.check_eta(&fam).is_ok());
    }

    #[test]
    fn undersized_eta_is_rejected() {
        let fam = self_dual_family();
        let values = StepPath::constant(HVector::new(vec![3.0, 4.0]).unwrap());
        let etas = StepFunction::constant(4.9);
        assert!(DualStepProcess::new(&fam, 0, values, etas).is_err());
    }

    #[test]
    fn gradient_member_eta_uses_the_embedding_bound() {
        let fam = SpaceFamily::new(
            vec![1.0],
            vec![SpaceDescriptor::w1p(2.0, vec![1.0], DifferenceStencil::forward(1, 1.0))],
        )
        .unwrap();
        let values = StepPath::constant(HVector::new(vec![2.0]).unwrap());
        let p = DualStepProcess::with_default_eta(&fam, 0, values).unwrap();
        // C = sqrt(w / μ^{2/p}) = 1, so η = |v*|_H = 2; the variational
        // lower bound cannot exceed it.
        assert_eq!(p.etas().values(), &[2.0]);
        assert!(p.check_eta(&fam).is_ok());
    }

    #[test]
    fn integrated_size_matches_hand_values() {
        let fam = self_dual_family();
        let a = IncreasingDriver::pure_jump(vec![(1.0, 1.0), (3.0, 2.0)]).unwrap();
        let p = DualStepProcess::new(
            &fam,
            0,
            StepPath::constant(HVector::zeros(2)),
            StepFunction::constant(2.0),
        )
        .unwrap();
        // q = 2: (∫ 2² dA)^(1/2) = sqrt(4 * 3).
        let q2 = p.integrated_size(&fam, &a, 3.0).unwrap();
        assert_eq!(q2, 12f64.sqrt());
    }

    #[test]
    fn infinite_conjugate_takes_the_essential_sup() {
        // p = 1 has conjugate q = ∞.
        let fam = SpaceFamily::new(vec![1.0], vec![SpaceDescriptor::lp(1.0, vec![1.0])]).unwrap();
        let a = IncreasingDriver::new(
            vec![1.0, 2.0],
            vec![1.0, 2.0],
            vec![DensitySegment { start: 0.0, end: 0.75, rate: 1.0 }],
        )
        .unwrap();
        let etas =
            StepFunction::new(vec![1.5], vec![2.0, 5.0], Convention::LeftContinuous).unwrap();
        let p = DualStepProcess::new(&fam, 0, StepPath::constant(HVector::zeros(1)), etas).unwrap();
        assert_eq!(p.integrated_size(&fam, &a, 0.5).unwrap(), 2.0);
        assert_eq!(p.integrated_size(&fam, &a, 1.0).unwrap(), 2.0);
        assert_eq!(p.integrated_size(&fam, &a, 2.0).unwrap(), 5.0);
        // Before any mass accumulates the essential sup over an empty
        // support is zero.
        let b = IncreasingDriver::pure_jump(vec![(4.0, 1.0)]).unwrap();
        assert_eq!(p.integrated_size(&fam, &b, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn scaling_scales_values_and_sizes_together() {
        let fam = self_dual_family();
        let values = StepPath::constant(HVector::new(vec![3.0, 4.0]).unwrap());
        let p = DualStepProcess::with_default_eta(&fam, 0, values).unwrap();
        let half = p.scale(0.5);
        assert_eq!(half.eval(0.0).as_slice(), &[1.5, 2.0]);
        assert_eq!(half.etas().values(), &[2.5]);
        assert!(half.check_eta(&fam).is_ok());
    }
}
