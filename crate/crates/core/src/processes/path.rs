//! A minimal cadlag-path interface shared by the jump martingale, composed
//! scenario paths, and spectral projections.

use crate::spaces::{HVector, SpaceFamily};
use crate::error::Result;
use crate::processes::martingale::MartingalePath;

pub trait HPath {
    fn dim(&self) -> usize;

    /// Cadlag value at `t >= 0`; `f64::INFINITY` yields the terminal value.
    fn eval(&self, t: f64) -> HVector;

    /// Left limit at `t > 0`.
    fn eval_left(&self, t: f64) -> HVector;

    /// Sorted times at which the path may jump or change slope; between
    /// consecutive kinks it is affine in time.
    fn kinks(&self) -> Vec<f64>;
}

impl HPath for MartingalePath {
    fn dim(&self) -> usize {
        MartingalePath::dim(self)
    }

    fn eval(&self, t: f64) -> HVector {
        MartingalePath::eval(self, t)
    }

    fn eval_left(&self, t: f64) -> HVector {
        MartingalePath::eval_left(self, t)
    }

    fn kinks(&self) -> Vec<f64> {
        self.times().to_vec()
    }
}

/// The path `t -> Π_k p(t)`: projection onto the span of the first `k`
/// orthonormal basis vectors of the family.
pub struct ProjectedPath<'a, P: HPath> {
    inner: &'a P,
    family: &'a SpaceFamily,
    k: usize,
}

impl<'a, P: HPath> ProjectedPath<'a, P> {
    pub fn new(inner: &'a P, family: &'a SpaceFamily, k: usize) -> Result<Self> {
        // Validate the rank and dimensions once so evaluation is infallible.
        family.project(&inner.eval(0.0), k)?;
        Ok(ProjectedPath { inner, family, k })
    }
}

impl<P: HPath> HPath for ProjectedPath<'_, P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, t: f64) -> HVector {
        self.family.project(&self.inner.eval(t), self.k).expect("validated at construction")
    }

    fn eval_left(&self, t: f64) -> HVector {
        self.family.project(&self.inner.eval_left(t), self.k).expect("validated at construction")
    }

    fn kinks(&self) -> Vec<f64> {
        self.inner.kinks()
    }
}
