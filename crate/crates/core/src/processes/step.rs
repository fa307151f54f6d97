//! Piecewise-constant functions of time (the only integrand class the
//! Stieltjes engine accepts) and dyadic rounding.
//!
//! Two interval conventions appear throughout:
//! * [`Convention::LeftContinuous`]: constant on `(c_{j-1}, c_j]`, the
//!   shape of drift step processes and right-sampled approximations;
//! * [`Convention::RightContinuous`]: constant on `[c_j, c_{j+1})`, the
//!   shape of left-sampled (cadlag) approximations.
//!
//! The first piece starts at time zero and the last extends to `+∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::HVector;

/// Which side of each cut a piece owns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    LeftContinuous,
    RightContinuous,
}

/// Scalar step function with finitely many pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionSpec", into = "StepFunctionSpec")]
pub struct StepFunction {
    cuts: Vec<f64>,
    values: Vec<f64>,
    convention: Convention,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepFunctionSpec {
    cuts: Vec<f64>,
    values: Vec<f64>,
    convention: Convention,
}

impl TryFrom<StepFunctionSpec> for StepFunction {
    type Error = Error;
    fn try_from(s: StepFunctionSpec) -> Result<Self> {
        StepFunction::new(s.cuts, s.values, s.convention)
    }
}

impl From<StepFunction> for StepFunctionSpec {
    fn from(f: StepFunction) -> StepFunctionSpec {
        StepFunctionSpec { cuts: f.cuts, values: f.values, convention: f.convention }
    }
}

fn validate_cuts(cuts: &[f64]) -> Result<()> {
    if cuts.iter().any(|c| !c.is_finite() || *c <= 0.0) {
        return Err(Error::invalid("step cuts", "must be finite and strictly positive"));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("step cuts", "must be strictly increasing"));
    }
    Ok(())
}

impl StepFunction {
    pub fn new(cuts: Vec<f64>, values: Vec<f64>, convention: Convention) -> Result<Self> {
        validate_cuts(&cuts)?;
        if values.len() != cuts.len() + 1 {
            return Err(Error::DimensionMismatch { expected: cuts.len() + 1, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "step function value" });
        }
        Ok(StepFunction { cuts, values, convention })
    }

    pub fn constant(value: f64) -> Self {
        StepFunction { cuts: Vec::new(), values: vec![value], convention: Convention::LeftContinuous }
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Index of the piece owning time `t >= 0`.
    fn piece(&self, t: f64) -> usize {
        match self.convention {
            // (c_{j-1}, c_j]: count cuts strictly below t.
            Convention::LeftContinuous => self.cuts.partition_point(|c| *c < t),
            // [c_j, c_{j+1}): count cuts at or below t.
            Convention::RightContinuous => self.cuts.partition_point(|c| *c <= t),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.values[self.piece(t)]
    }

    /// Apply `op` pointwise to `self` and `other` (same convention),
    /// producing a step function on the merged cuts.
    pub fn map2(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        assert_eq!(self.convention, other.convention, "conventions must match");
        let cuts = merge_cuts(&self.cuts, &other.cuts);
        let values = piece_probes(&cuts, self.convention)
            .map(|t| op(self.eval(t), other.eval(t)))
            .collect();
        StepFunction { cuts, values, convention: self.convention }
    }

    /// Apply `op` to every value.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            cuts: self.cuts.clone(),
            values: self.values.iter().map(|v| op(*v)).collect(),
            convention: self.convention,
        }
    }
}

/// A vector-valued step path under the same conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepPathSpec", into = "StepPathSpec")]
pub struct StepPath {
    cuts: Vec<f64>,
    values: Vec<HVector>,
    convention: Convention,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepPathSpec {
    cuts: Vec<f64>,
    values: Vec<HVector>,
    convention: Convention,
}

impl TryFrom<StepPathSpec> for StepPath {
    type Error = Error;
    fn try_from(s: StepPathSpec) -> Result<Self> {
        StepPath::new(s.cuts, s.values, s.convention)
    }
}

impl From<StepPath> for StepPathSpec {
    fn from(f: StepPath) -> StepPathSpec {
        StepPathSpec { cuts: f.cuts, values: f.values, convention: f.convention }
    }
}

impl StepPath {
    pub fn new(cuts: Vec<f64>, values: Vec<HVector>, convention: Convention) -> Result<Self> {
        validate_cuts(&cuts)?;
        if values.len() != cuts.len() + 1 {
            return Err(Error::DimensionMismatch { expected: cuts.len() + 1, got: values.len() });
        }
        let d = values[0].dim();
        if values.iter().any(|v| v.dim() != d) {
            return Err(Error::invalid("step path", "values must share one dimension"));
        }
        Ok(StepPath { cuts, values, convention })
    }

    pub fn constant(value: HVector) -> Self {
        StepPath { cuts: Vec::new(), values: vec![value], convention: Convention::LeftContinuous }
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn values(&self) -> &[HVector] {
        &self.values
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    fn piece(&self, t: f64) -> usize {
        match self.convention {
            Convention::LeftContinuous => self.cuts.partition_point(|c| *c < t),
            Convention::RightContinuous => self.cuts.partition_point(|c| *c <= t),
        }
    }

    pub fn eval(&self, t: f64) -> &HVector {
        &self.values[self.piece(t)]
    }

    /// Left limit: the value of the piece strictly before `t`. For
    /// right-continuous paths this is the cadlag left limit; for
    /// left-continuous ones it coincides with `eval`.
    pub fn eval_left(&self, t: f64) -> &HVector {
        &self.values[self.cuts.partition_point(|c| *c < t)]
    }

    /// Scalar step function `t -> op(self(t))`.
    pub fn map_scalar(&self, op: impl Fn(&HVector) -> f64) -> StepFunction {
        StepFunction {
            cuts: self.cuts.clone(),
            values: self.values.iter().map(op).collect(),
            convention: self.convention,
        }
    }

    /// Pairing with another step object of the same convention:
    /// `t -> op(self(t), other(t))` on merged cuts.
    pub fn pair_scalar(&self, other: &StepPath, op: impl Fn(&HVector, &HVector) -> f64) -> StepFunction {
        assert_eq!(self.convention, other.convention, "conventions must match");
        let cuts = merge_cuts(&self.cuts, &other.cuts);
        let values = piece_probes(&cuts, self.convention)
            .map(|t| op(self.eval(t), other.eval(t)))
            .collect();
        StepFunction { cuts, values, convention: self.convention }
    }
}

/// Sorted union of two cut lists (exact merge, duplicates removed).
fn merge_cuts(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
                *x
            }
            (Some(x), Some(y)) if x < y => {
                i += 1;
                *x
            }
            (Some(_), Some(y)) => {
                j += 1;
                *y
            }
            (Some(x), None) => {
                i += 1;
                *x
            }
            (None, Some(y)) => {
                j += 1;
                *y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// One probe time inside each piece of a cut list, exact under the given
/// convention (piece endpoints, never midpoints).
fn piece_probes(cuts: &[f64], convention: Convention) -> impl Iterator<Item = f64> + '_ {
    let n = cuts.len() + 1;
    (0..n).map(move |j| match convention {
        // (c_{j-1}, c_j]: the right endpoint lies in the piece; past the
        // last cut any larger time works.
        Convention::LeftContinuous => {
            if j < cuts.len() {
                cuts[j]
            } else if cuts.is_empty() {
                1.0
            } else {
                cuts[cuts.len() - 1] + 1.0
            }
        }
        // [c_j, c_{j+1}): the left endpoint lies in the piece.
        Convention::RightContinuous => {
            if j == 0 {
                0.0
            } else {
                cuts[j - 1]
            }
        }
    })
}

/// Dyadic rounding variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingVariant {
    /// `2^-n * floor(2^n t)`.
    Down,
    /// `2^-n * ceil(2^n t)`.
    Up,
}

/// Round `t` to the dyadic grid of mesh `2^-n`.
pub fn kappa(n: u32, t: f64, variant: RoundingVariant) -> f64 {
    let scale = 2f64.powi(n as i32);
    match variant {
        RoundingVariant::Down => (scale * t).floor() / scale,
        RoundingVariant::Up => (scale * t).ceil() / scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_continuous_owns_its_right_endpoint() {
        let f = StepFunction::new(vec![1.0, 3.0], vec![10.0, 20.0, 30.0], Convention::LeftContinuous)
            .unwrap();
        assert_eq!(f.eval(0.0), 10.0);
        assert_eq!(f.eval(1.0), 10.0);
        assert_eq!(f.eval(1.5), 20.0);
        assert_eq!(f.eval(3.0), 20.0);
        assert_eq!(f.eval(7.0), 30.0);
    }

    #[test]
    fn right_continuous_owns_its_left_endpoint() {
        let f =
            StepFunction::new(vec![1.0, 3.0], vec![10.0, 20.0, 30.0], Convention::RightContinuous)
                .unwrap();
        assert_eq!(f.eval(0.0), 10.0);
        assert_eq!(f.eval(1.0), 20.0);
        assert_eq!(f.eval(3.0), 30.0);
    }

    #[test]
    fn map2_merges_cuts_exactly() {
        let a = StepFunction::new(vec![1.0], vec![1.0, 2.0], Convention::LeftContinuous).unwrap();
        let b = StepFunction::new(vec![2.0], vec![10.0, 20.0], Convention::LeftContinuous).unwrap();
        let prod = a.map2(&b, |x, y| x * y);
        assert_eq!(prod.cuts(), &[1.0, 2.0]);
        assert_eq!(prod.values(), &[10.0, 20.0, 40.0]);
    }

    #[test]
    fn malformed_steps_are_rejected() {
        assert!(StepFunction::new(vec![2.0, 1.0], vec![0.0; 3], Convention::LeftContinuous).is_err());
        assert!(StepFunction::new(vec![1.0], vec![0.0], Convention::LeftContinuous).is_err());
        assert!(StepFunction::new(vec![0.0], vec![0.0, 1.0], Convention::LeftContinuous).is_err());
    }

    #[test]
    fn kappa_matches_hand_values() {
        assert_eq!(kappa(2, 0.3, RoundingVariant::Down), 0.25);
        assert_eq!(kappa(2, 0.3, RoundingVariant::Up), 0.5);
    }

    #[test]
    fn kappa_brackets_and_fixes_dyadics() {
        for n in 0..10u32 {
            for k in 0..40u64 {
                let t = k as f64 * 0.077 + 0.013;
                let lo = kappa(n, t, RoundingVariant::Down);
                let hi = kappa(n, t, RoundingVariant::Up);
                assert!(lo <= t && t <= hi);
                assert!(hi - lo <= 2f64.powi(-(n as i32)) + 1e-15);
            }
            // Dyadic points of mesh 2^-n are fixed by both variants.
            let t = 5.0 * 2f64.powi(-(n as i32));
            assert_eq!(kappa(n, t, RoundingVariant::Down), t);
            assert_eq!(kappa(n, t, RoundingVariant::Up), t);
        }
    }
}
