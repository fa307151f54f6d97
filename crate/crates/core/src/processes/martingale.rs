//! The pivot-space jump path `h`: constant between finitely many jump
//! times, cadlag, with exact left limits, jump lookup, and pathwise
//! bracket `[h]_t = Σ_{s<=t} |Δh(s)|²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{HVector, SpaceFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MartingaleSpec", into = "MartingaleSpec")]
pub struct MartingalePath {
    initial: HVector,
    times: Vec<f64>,
    jumps: Vec<HVector>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MartingaleSpec {
    initial: HVector,
    times: Vec<f64>,
    jumps: Vec<HVector>,
}

impl TryFrom<MartingaleSpec> for MartingalePath {
    type Error = Error;
    fn try_from(s: MartingaleSpec) -> Result<Self> {
        MartingalePath::new(s.initial, s.times, s.jumps)
    }
}

impl From<MartingalePath> for MartingaleSpec {
    fn from(h: MartingalePath) -> MartingaleSpec {
        MartingaleSpec { initial: h.initial, times: h.times, jumps: h.jumps }
    }
}

impl MartingalePath {
    pub fn new(initial: HVector, times: Vec<f64>, jumps: Vec<HVector>) -> Result<Self> {
        if times.len() != jumps.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: jumps.len() });
        }
        if times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::invalid("jump path", "jump times must be finite and positive"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("jump path", "jump times must be strictly increasing"));
        }
        if jumps.iter().any(|dh| dh.dim() != initial.dim()) {
            return Err(Error::invalid("jump path", "jumps must match the initial dimension"));
        }
        Ok(MartingalePath { initial, times, jumps })
    }

    /// The path that sits at `0 ∈ H` forever.
    pub fn zero(dim: usize) -> Self {
        MartingalePath { initial: HVector::zeros(dim), times: Vec::new(), jumps: Vec::new() }
    }

    /// Constant path (no jumps).
    pub fn constant(initial: HVector) -> Self {
        MartingalePath { initial, times: Vec::new(), jumps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn initial(&self) -> &HVector {
        &self.initial
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn jumps(&self) -> &[HVector] {
        &self.jumps
    }

    /// `h(t)` (cadlag: the jump at `t` is included).
    pub fn eval(&self, t: f64) -> HVector {
        self.sum_until(|tk| tk <= t)
    }

    /// Left limit `h(t-)`.
    pub fn eval_left(&self, t: f64) -> HVector {
        self.sum_until(|tk| tk < t)
    }

    /// Value past the last jump.
    pub fn final_value(&self) -> HVector {
        self.sum_until(|_| true)
    }

    fn sum_until(&self, keep: impl Fn(f64) -> bool) -> HVector {
        let mut out = self.initial.clone();
        for (tk, dh) in self.times.iter().zip(&self.jumps) {
            if !keep(*tk) {
                break;
            }
            out = out.axpy(1.0, dh);
        }
        out
    }

    /// `Δh(t)`, zero off the jump set.
    pub fn jump_at(&self, t: f64) -> HVector {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(k) => self.jumps[k].clone(),
            Err(_) => HVector::zeros(self.dim()),
        }
    }

    /// Pathwise bracket `[h]_t = Σ_{s<=t} |Δh(s)|²` in the pivot norm.
    pub fn quadratic_variation(&self, family: &SpaceFamily, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (tk, dh) in self.times.iter().zip(&self.jumps) {
            if *tk > t {
                break;
            }
            acc += family.h_norm_sq(dh)?;
        }
        Ok(acc)
    }

    /// The path scaled by `c` (initial value and every jump).
    pub fn scale(&self, c: f64) -> MartingalePath {
        MartingalePath {
            initial: self.initial.scale(c),
            times: self.times.clone(),
            jumps: self.jumps.iter().map(|dh| dh.scale(c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceDescriptor;

    fn unit_family() -> SpaceFamily {
        SpaceFamily::new(vec![1.0], vec![SpaceDescriptor::lp(2.0, vec![1.0])]).unwrap()
    }

    fn killed_at_one() -> MartingalePath {
        MartingalePath::new(
            HVector::new(vec![1.0]).unwrap(),
            vec![1.0],
            vec![HVector::new(vec![-1.0]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn eval_and_left_limits_match_hand_values() {
        let h = killed_at_one();
        assert_eq!(h.eval(0.0).as_slice(), &[1.0]);
        assert_eq!(h.eval(0.5).as_slice(), &[1.0]);
        assert_eq!(h.eval(1.0).as_slice(), &[0.0]);
        assert_eq!(h.eval_left(1.0).as_slice(), &[1.0]);
        assert_eq!(h.eval(2.0).as_slice(), &[0.0]);
        assert_eq!(h.jump_at(1.0).as_slice(), &[-1.0]);
        assert!(h.jump_at(0.7).is_zero());
    }

    #[test]
    fn bracket_accumulates_squared_jumps() {
        let h = killed_at_one();
        let fam = unit_family();
        assert_eq!(h.quadratic_variation(&fam, 0.5).unwrap(), 0.0);
        assert_eq!(h.quadratic_variation(&fam, 1.0).unwrap(), 1.0);
        assert_eq!(h.quadratic_variation(&fam, 9.0).unwrap(), 1.0);
    }

    #[test]
    fn scaling_is_homogeneous() {
        let h = killed_at_one();
        let fam = unit_family();
        let g = h.scale(0.5);
        assert_eq!(g.eval(0.5).as_slice(), &[0.5]);
        assert_eq!(g.quadratic_variation(&fam, 2.0).unwrap(), 0.25);
    }

    #[test]
    fn malformed_paths_are_rejected() {
        let one = HVector::new(vec![1.0]).unwrap();
        let two = HVector::new(vec![1.0, 2.0]).unwrap();
        assert!(MartingalePath::new(one.clone(), vec![1.0], vec![]).is_err());
        assert!(MartingalePath::new(one.clone(), vec![-1.0], vec![one.clone()]).is_err());
        assert!(MartingalePath::new(one.clone(), vec![2.0, 1.0], vec![one.clone(), one.clone()])
            .is_err());
        assert!(MartingalePath::new(one, vec![1.0], vec![two]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let h = killed_at_one();
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"initial\""));
        assert!(json.contains("\"times\""));
        assert!(json.contains("\"jumps\""));
        let back: MartingalePath = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
    }
}
